"""Experiment configuration and its flat ``key=value`` text format."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace

from .classifiers import KINDS, TrainConfig
from .dataset import SynthConfig
from .errors import InvalidConfigError
from .fairgroups import BalanceRatio, reduce_ratio
from .pipeline import PropagationMode


@dataclass(frozen=True)
class ExperimentConfig:
    # data source: a CSV path, or the synthetic generator when data is None
    data: str | None = None
    target: str = "medicaid"
    n: int = 10000
    prevalence: float = 0.88
    noise: float = 0.05
    proxy_strength: float = 0.5
    seed_synth: int = 7

    protected: str = "household_income"
    threshold: float | None = 20000.0

    classifier: str = "logistic"
    learning_rate: float = 0.5
    epochs: int = 500
    l2: float = 1e-4
    svm_c: float = 1.0
    seed_train: int = 0

    k: int = 5
    ratio: BalanceRatio = BalanceRatio(4, 1)
    mode: PropagationMode = PropagationMode.ONE_SIDED
    alpha: float = 0.25
    split: float = 0.8
    max_iters: int = 100
    n_init: int = 20

    seed_split: int = 11
    seed_cluster: int = 13
    seed_repr: int = 17

    def __post_init__(self):
        if self.classifier not in KINDS:
            raise InvalidConfigError(f"classifier: must be one of {', '.join(KINDS)}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidConfigError("k: must be a positive integer")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidConfigError("alpha: must lie in [0, 1]")
        if not 0.0 < self.split < 1.0:
            raise InvalidConfigError("split: must lie strictly between 0 and 1")
        if self.data is None and self.n < 10:
            raise InvalidConfigError("n: must be at least 10")
        if not 0.0 < self.prevalence < 1.0:
            raise InvalidConfigError("prevalence: must lie strictly between 0 and 1")
        if not 0.0 <= self.noise < 0.5:
            raise InvalidConfigError("noise: must lie in [0, 0.5)")
        if not 0.0 <= self.proxy_strength <= 1.0:
            raise InvalidConfigError("proxy-strength: must lie in [0, 1]")
        if self.max_iters < 1:
            raise InvalidConfigError("max-iters: must be positive")
        if self.n_init < 1:
            raise InvalidConfigError("n-init: must be positive")
        if self.threshold is not None and not math.isfinite(self.threshold):
            raise InvalidConfigError("threshold: must be finite")
        if not isinstance(self.mode, PropagationMode):
            object.__setattr__(self, "mode", PropagationMode.parse(self.mode))

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            protected_prevalence=self.prevalence,
            label_noise=self.noise,
            proxy_strength=self.proxy_strength,
        )

    def train_config(self) -> TrainConfig:
        try:
            return TrainConfig(
                kind=self.classifier,
                learning_rate=self.learning_rate,
                epochs=self.epochs,
                l2=self.l2,
                svm_c=self.svm_c,
                seed=self.seed_train,
            )
        except InvalidConfigError as exc:
            raise InvalidConfigError(f"classifier settings: {exc}") from None

    def with_updates(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def to_text(self) -> str:
        return format_config(self)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()[:12]


def _key(name: str) -> str:
    return name.replace("_", "-")


def parse_ratio(text: str) -> BalanceRatio:
    a, sep, b = str(text).partition(":")
    if not sep:
        raise InvalidConfigError(f"ratio: expected a:b, got {text!r}")
    try:
        return reduce_ratio(int(a), int(b))
    except ValueError:
        raise InvalidConfigError(f"ratio: parts must be positive integers, got {text!r}") from None


def _parse_value(name: str, raw: str, default):
    raw = raw.strip()
    try:
        if name == "ratio":
            return parse_ratio(raw)
        if name == "mode":
            return PropagationMode.parse(raw)
        if name in ("data", "threshold"):
            if raw.lower() in ("", "none"):
                return None
            return float(raw) if name == "threshold" else raw
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except InvalidConfigError:
        raise
    except ValueError:
        raise InvalidConfigError(f"{_key(name)}: cannot parse {raw!r}") from None


_FIELDS = {_key(f.name): f.name for f in fields(ExperimentConfig)}


def config_from_mapping(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    base = base or ExperimentConfig()
    updates = {}
    for key, raw in values.items():
        name = _FIELDS.get(_key(key))
        if name is None:
            raise InvalidConfigError(f"{key}: unknown configuration key")
        updates[name] = _parse_value(name, str(raw), getattr(ExperimentConfig(), name))
    return replace(base, **updates)


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfigError(f"line {lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return config_from_mapping(values, base)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base)


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, PropagationMode):
        return v.value
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{_key(f.name)}={_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))
