"""From-scratch linear classifiers: ridge least squares, logistic regression and
a linear SVM, all trained on standardized unprotected features."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import (
    DegenerateDataError,
    InvalidConfigError,
    NonFiniteLossError,
    SchemaMismatchError,
)

KINDS = ("linear", "logistic", "svm")
MODEL_FORMAT = "fairgroup-linear-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    kind: str = "logistic"
    learning_rate: float = 0.5
    epochs: int = 500
    l2: float = 1e-4
    svm_c: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfigError(f"unknown classifier kind {self.kind!r}")
        if not self.learning_rate > 0:
            raise InvalidConfigError("learning_rate must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise InvalidConfigError("epochs must be a positive integer")
        if not self.l2 >= 0:
            raise InvalidConfigError("l2 must be nonnegative")
        if not self.svm_c > 0:
            raise InvalidConfigError("svm_c must be positive")


@dataclass(frozen=True, eq=False)
class LinearModel:
    kind: str
    feature_names: tuple[str, ...]
    weights: np.ndarray
    bias: float
    means: np.ndarray
    scales: np.ndarray
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfigError(f"unknown classifier kind {self.kind!r}")
        names = tuple(self.feature_names)
        arrays = []
        for a in (self.weights, self.means, self.scales):
            a = np.array(a, dtype=np.float64)
            if a.shape != (len(names),):
                raise SchemaMismatchError("weights/means/scales must match feature_names")
            a.setflags(write=False)
            arrays.append(a)
        if np.any(arrays[2] <= 0):
            raise InvalidConfigError("scales must be strictly positive")
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "weights", arrays[0])
        object.__setattr__(self, "means", arrays[1])
        object.__setattr__(self, "scales", arrays[2])
        object.__setattr__(self, "bias", float(self.bias))

    def equals(self, other: "LinearModel") -> bool:
        return (
            self.kind == other.kind
            and self.feature_names == other.feature_names
            and np.array_equal(self.weights, other.weights)
            and self.bias == other.bias
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.scales, other.scales)
        )


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# Losses return (loss, grad_w, grad_b); Z is standardized, y in {0, 1}.


def logistic_loss(w, b, Z, y, l2=0.0):
    s = Z @ w + b
    # log(1 + e^s) - y s, computed stably
    loss = np.mean(np.logaddexp(0.0, s) - y * s) + 0.5 * l2 * np.dot(w, w)
    r = sigmoid(s) - y
    return loss, Z.T @ r / len(y) + l2 * w, float(np.mean(r))


def hinge_loss(w, b, Z, y, l2=0.0, c=1.0):
    t = 2.0 * y - 1.0
    s = Z @ w + b
    margin = 1.0 - t * s
    active = margin > 0
    loss = c * np.mean(np.where(active, margin, 0.0)) + 0.5 * l2 * np.dot(w, w)
    coef = np.where(active, -t, 0.0) * c / len(y)
    return loss, Z.T @ coef + l2 * w, float(coef.sum())


def squared_loss(w, b, Z, y, l2=0.0):
    r = Z @ w + b - y
    return 0.5 * np.mean(r * r) + 0.5 * l2 * np.dot(w, w), Z.T @ r / len(y) + l2 * w, float(np.mean(r))


def _standardize(X):
    means = X.mean(axis=0)
    sd = X.std(axis=0)
    const = sd == 0
    scales = np.where(const, 1.0, sd)
    return (X - means) / scales, means, scales, const


def _fit_linear(Z, y, l2, const):
    w = np.zeros(Z.shape[1])
    live = ~const
    if live.any():
        Zl = Z[:, live]
        n = len(y)
        A = Zl.T @ Zl / n + l2 * np.eye(Zl.shape[1])
        rhs = Zl.T @ (y - y.mean()) / n
        try:
            w[live] = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            w[live] = np.linalg.lstsq(A, rhs, rcond=None)[0]
    # columns of Z are centered, so the intercept decouples
    return w, float(y.mean()), (float(squared_loss(w, y.mean(), Z, y, l2)[0]),)


def _fit_descent(Z, y, cfg, const):
    rng = np.random.default_rng(cfg.seed)
    w = np.where(const, 0.0, rng.normal(0.0, 1e-3, Z.shape[1]))
    b = 0.0
    history = []
    for epoch in range(cfg.epochs):
        if cfg.kind == "logistic":
            loss, gw, gb = logistic_loss(w, b, Z, y, cfg.l2)
            step = cfg.learning_rate
        else:
            loss, gw, gb = hinge_loss(w, b, Z, y, cfg.l2, cfg.svm_c)
            step = cfg.learning_rate / np.sqrt(epoch + 1.0)
        if not np.isfinite(loss) or not np.all(np.isfinite(gw)):
            raise NonFiniteLossError(f"{cfg.kind} loss diverged at epoch {epoch}; lower the learning rate")
        history.append(float(loss))
        w = np.where(const, 0.0, w - step * gw)
        b -= step * gb
    final = (logistic_loss(w, b, Z, y, cfg.l2) if cfg.kind == "logistic" else hinge_loss(w, b, Z, y, cfg.l2, cfg.svm_c))[0]
    if not np.isfinite(final):
        raise NonFiniteLossError(f"{cfg.kind} loss diverged; lower the learning rate")
    history.append(float(final))
    return w, float(b), tuple(history)


def train(d: Dataset, cfg: TrainConfig | None = None) -> LinearModel:
    """Fit a model on ``d``'s unprotected features against its target.

    Rows are put in a canonical order before any arithmetic, so the fitted
    model does not depend on the row order of ``d``.
    """
    cfg = cfg or TrainConfig()
    names = tuple(d.unprotected_names)
    if not names:
        raise SchemaMismatchError("no unprotected features to train on")
    if d.n < 2:
        raise DegenerateDataError("need at least two rows to train")
    X = d.matrix(names)
    y = d.target.astype(np.float64)
    if np.all(y == y[0]):
        raise DegenerateDataError("all targets are identical")
    order = np.lexsort(np.column_stack([X, y]).T[::-1])
    X, y = X[order], y[order]

    Z, means, scales, const = _standardize(X)
    if cfg.kind == "linear":
        w, b, history = _fit_linear(Z, y, cfg.l2, const)
    else:
        with np.errstate(over="ignore", invalid="ignore"):  # divergence is checked explicitly
            w, b, history = _fit_descent(Z, y, cfg, const)
    return LinearModel(cfg.kind, names, w, b, means, scales, history)


def _design(m: LinearModel, d: Dataset) -> np.ndarray:
    if d.unprotected_names != list(m.feature_names):
        raise SchemaMismatchError(
            f"model expects features {list(m.feature_names)}, dataset has {d.unprotected_names}"
        )
    return (d.matrix(m.feature_names) - m.means) / m.scales


def score(m: LinearModel, d: Dataset) -> np.ndarray:
    """Pre-threshold output: the probability for logistic models, the raw linear value otherwise."""
    s = _design(m, d) @ m.weights + m.bias
    if m.kind == "logistic":
        return sigmoid(s)
    return s


def threshold(kind: str) -> float:
    return 0.0 if kind == "svm" else 0.5


def predict(m: LinearModel, d: Dataset) -> np.ndarray:
    # ties go to the positive label
    return (score(m, d) >= threshold(m.kind)).astype(np.int64)


# ------------------------------------------------------------ persistence


def _floats(a) -> str:
    return ",".join(repr(float(x)) for x in a)


def save_model(m: LinearModel, path) -> None:
    lines = [
        f"format={MODEL_FORMAT}",
        f"version={MODEL_VERSION}",
        f"kind={m.kind}",
        f"features={','.join(m.feature_names)}",
        f"weights={_floats(m.weights)}",
        f"bias={m.bias!r}",
        f"means={_floats(m.means)}",
        f"scales={_floats(m.scales)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> LinearModel:
    fields = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfigError(f"malformed model line {line!r}")
        fields[key.strip()] = value.strip()
    if fields.get("format") != MODEL_FORMAT:
        raise InvalidConfigError("not a fairgroup model file")
    if fields.get("version") != str(MODEL_VERSION):
        raise InvalidConfigError(f"unsupported model version {fields.get('version')!r}")

    def vec(key):
        raw = fields[key]
        return [float(x) for x in raw.split(",")] if raw else []

    names = tuple(fields["features"].split(",")) if fields["features"] else ()
    return LinearModel(fields["kind"], names, vec("weights"), float(fields["bias"]), vec("means"), vec("scales"))
