"""Tabular data container, CSV ingestion, protected-feature encoding and the
synthetic ACS-like generator used for desk-scale experiments."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlreadyBinaryError,
    DataError,
    EmptyFileError,
    InvalidConfigError,
    MissingColumnError,
    NonBinaryValueError,
    ParseError,
    UnknownFeatureError,
)

UNPROTECTED = "unprotected"
PROTECTED = "protected"
TARGET = "target"
ROLES = (UNPROTECTED, PROTECTED, TARGET)

NUMERIC = "numeric"
BINARY = "binary"
KINDS = (NUMERIC, BINARY)


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    role: str = UNPROTECTED
    kind: str = NUMERIC

    def __post_init__(self):
        if self.role not in ROLES:
            raise DataError(f"feature {self.name!r}: unknown role {self.role!r}")
        if self.kind not in KINDS:
            raise DataError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.role == TARGET and self.kind != BINARY:
            raise DataError(f"target {self.name!r} must be binary")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Column-oriented table with one binary target and at most one protected feature.

    Columns are stored as read-only float64 arrays in FeatureSpec order. Row order is
    significant: row ``j`` is point ``j`` everywhere downstream.
    """

    specs: tuple[FeatureSpec, ...]
    columns: Mapping[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        specs = tuple(self.specs)
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise DataError("duplicate feature names")
        if sum(s.role == TARGET for s in specs) != 1:
            raise DataError("exactly one feature must have role=target")
        if sum(s.role == PROTECTED for s in specs) > 1:
            raise DataError("at most one feature may have role=protected")
        if set(self.columns) != set(names):
            missing = [nm for nm in names if nm not in self.columns]
            if missing:
                raise MissingColumnError(missing[0])
            raise DataError("columns do not match specs")

        cols = {}
        n = None
        for spec in specs:
            col = np.array(self.columns[spec.name], dtype=np.float64)
            if col.ndim != 1:
                raise DataError(f"column {spec.name!r} is not one-dimensional")
            if n is None:
                n = col.shape[0]
            elif col.shape[0] != n:
                raise DataError(f"column {spec.name!r} has length {col.shape[0]}, expected {n}")
            if not np.all(np.isfinite(col)):
                row = int(np.flatnonzero(~np.isfinite(col))[0])
                raise ParseError(row, spec.name)
            if spec.kind == BINARY:
                bad = np.flatnonzero((col != 0.0) & (col != 1.0))
                if bad.size:
                    raise NonBinaryValueError(spec.name, int(bad[0]))
            col.setflags(write=False)
            cols[spec.name] = col
        if not n:
            raise EmptyFileError("dataset has no rows")
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.specs]

    def spec(self, name: str) -> FeatureSpec:
        for s in self.specs:
            if s.name == name:
                return s
        raise UnknownFeatureError(name)

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise UnknownFeatureError(name)
        return self.columns[name]

    @property
    def target_name(self) -> str:
        return next(s.name for s in self.specs if s.role == TARGET)

    @property
    def protected_name(self) -> str | None:
        return next((s.name for s in self.specs if s.role == PROTECTED), None)

    @property
    def unprotected_names(self) -> list[str]:
        return [s.name for s in self.specs if s.role == UNPROTECTED]

    @property
    def target(self) -> np.ndarray:
        return self.columns[self.target_name].astype(np.int64)

    @property
    def protected(self) -> np.ndarray:
        name = self.protected_name
        if name is None:
            raise DataError("dataset has no protected feature")
        return self.columns[name].astype(np.int64)

    def matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        """Stack the named columns (default: unprotected features) into an n x N array."""
        if names is None:
            names = self.unprotected_names
        if not names:
            return np.empty((self.n, 0))
        return np.column_stack([self.column(nm) for nm in names])

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.specs, {k: v[idx] for k, v in self.columns.items()})

    def equals(self, other: "Dataset") -> bool:
        return self.specs == other.specs and all(
            np.array_equal(self.columns[k], other.columns[k]) for k in self.columns
        )

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.equals(other)

    __hash__ = None


# --------------------------------------------------------------------- CSV


def _format_number(x: float) -> str:
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def load_csv(path, specs: Iterable[FeatureSpec]) -> Dataset:
    """Read a header-first comma-separated file into a Dataset, columns in FeatureSpec order.

    Extra columns in the file are ignored. ``row`` in raised errors is the
    1-based line number in the file (the header is line 1).
    """
    specs = tuple(specs)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise EmptyFileError(f"{path}: no header row")
        header = [h.strip() for h in header]
        pos = {}
        for spec in specs:
            if spec.name not in header:
                raise MissingColumnError(spec.name)
            pos[spec.name] = header.index(spec.name)
        values: dict[str, list[float]] = {s.name: [] for s in specs}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            for spec in specs:
                i = pos[spec.name]
                cell = row[i].strip() if i < len(row) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(lineno, spec.name, cell) from None
                if not math.isfinite(v):
                    raise ParseError(lineno, spec.name, cell)
                if spec.kind == BINARY and v not in (0.0, 1.0):
                    raise NonBinaryValueError(spec.name, lineno)
                values[spec.name].append(v)
    if not values or not next(iter(values.values())):
        raise EmptyFileError(f"{path}: no data rows")
    return Dataset(specs, {k: np.asarray(v) for k, v in values.items()})


def save_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(d.names)
        cols = [d.columns[nm] for nm in d.names]
        for j in range(d.n):
            w.writerow([_format_number(float(c[j])) for c in cols])


def infer_specs(path, target: str) -> list[FeatureSpec]:
    """Derive specs from a CSV header: 0/1-only columns are binary, the rest numeric."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFileError(f"{path}: no header row")
        header = [h.strip() for h in header]
        binary = [True] * len(header)
        for row in reader:
            for i, cell in enumerate(row[: len(header)]):
                if binary[i] and cell.strip() not in ("0", "1", "0.0", "1.0"):
                    binary[i] = False
    if target not in header:
        raise MissingColumnError(target)
    return [
        FeatureSpec(h, TARGET if h == target else UNPROTECTED, BINARY if b or h == target else NUMERIC)
        for h, b in zip(header, binary)
    ]


# ------------------------------------------------------- protected feature


def _demote_protected(specs):
    return [replace(s, role=UNPROTECTED) if s.role == PROTECTED else s for s in specs]


def binarize_protected(d: Dataset, feature: str, threshold: float) -> Dataset:
    """Replace a numeric feature by ``1[value < threshold]`` and mark it protected.

    Any previously protected feature becomes unprotected, so a run always has
    exactly one protected feature.
    """
    spec = d.spec(feature)
    if spec.role == TARGET:
        raise UnknownFeatureError(feature)
    if spec.kind == BINARY:
        raise AlreadyBinaryError(f"feature {feature!r} is already binary")
    flags = (d.column(feature) < threshold).astype(np.float64)
    specs = [
        FeatureSpec(feature, PROTECTED, BINARY) if s.name == feature else s
        for s in _demote_protected(d.specs)
    ]
    cols = dict(d.columns)
    cols[feature] = flags
    return Dataset(tuple(specs), cols)


def set_protected(d: Dataset, feature: str) -> Dataset:
    """Mark an existing binary feature as the protected one."""
    spec = d.spec(feature)
    if spec.role == TARGET:
        raise UnknownFeatureError(feature)
    if spec.kind != BINARY:
        raise DataError(f"feature {feature!r} is numeric; give a threshold to binarize it")
    specs = [replace(s, role=PROTECTED) if s.name == feature else s for s in _demote_protected(d.specs)]
    return Dataset(tuple(specs), d.columns)


# --------------------------------------------------------------- synthetic

ACS_SCHEMA = (
    FeatureSpec("age"),
    FeatureSpec("gender", kind=BINARY),
    FeatureSpec("race"),
    FeatureSpec("state"),
    FeatureSpec("division"),
    FeatureSpec("region"),
    FeatureSpec("household_size"),
    FeatureSpec("num_children"),
    FeatureSpec("hearing_difficulty", kind=BINARY),
    FeatureSpec("vision_difficulty", kind=BINARY),
    FeatureSpec("ambulatory_difficulty", kind=BINARY),
    FeatureSpec("selfcare_difficulty", kind=BINARY),
    FeatureSpec("class_of_worker"),
    FeatureSpec("household_income"),
    FeatureSpec("interest_income"),
    FeatureSpec("poverty_status", kind=BINARY),
    FeatureSpec("medicaid", role=TARGET, kind=BINARY),
)

INCOME_THRESHOLD = 20000.0

# Coefficients act on z-scored columns of the generated sample. Income carries
# the dominant coefficient, with a positive sign: the historical labels favour
# better-off households, which is the bias the fairgroups are meant to correct.
DEFAULT_EFFECTS = {
    "household_income": 3.5,
    "poverty_status": 1.2,
    "class_of_worker": 0.6,
    "interest_income": -0.5,
    "num_children": 0.4,
    "household_size": 0.2,
    "age": 0.3,
    "hearing_difficulty": 0.15,
    "vision_difficulty": 0.15,
    "ambulatory_difficulty": 0.25,
    "selfcare_difficulty": 0.25,
}


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs.

    ``protected_prevalence`` is the share of households earning below
    ``INCOME_THRESHOLD``; ``label_noise`` is the probability of flipping the
    ground-truth label. ``proxy_strength`` in [0, 1] controls how far low
    income shifts household size, disability, class of worker and interest
    income, i.e. how visible it is to a classifier that never sees it.
    """

    protected_prevalence: float = 0.88
    label_noise: float = 0.05
    intercept: float = -1.0
    proxy_strength: float = 0.5
    effects: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_EFFECTS))

    def validate(self):
        if not 0.0 < self.protected_prevalence < 1.0:
            raise InvalidConfigError("protected_prevalence must lie in (0, 1)")
        if not 0.0 <= self.label_noise < 0.5:
            raise InvalidConfigError("label_noise must lie in [0, 0.5)")
        if not math.isfinite(self.intercept):
            raise InvalidConfigError("intercept must be finite")
        if not 0.0 <= self.proxy_strength <= 1.0:
            raise InvalidConfigError("proxy_strength must lie in [0, 1]")
        known = {s.name for s in ACS_SCHEMA if s.role != TARGET}
        for name, beta in self.effects.items():
            if name not in known:
                raise InvalidConfigError(f"effect for unknown feature {name!r}")
            if not math.isfinite(beta):
                raise InvalidConfigError(f"effect for {name!r} must be finite")


def _zscore(x):
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else np.zeros_like(x)


def synth_acs(n: int, seed: int, config: SynthConfig | None = None) -> Dataset:
    """Generate an ACS-like household table with a ``medicaid`` target.

    Every feature is unprotected; callers pick the protected feature with
    :func:`binarize_protected` (household income) or :func:`set_protected`
    (poverty status). The label is ``1[logit > 0]`` for a linear logit over the
    columns, then flipped with probability ``label_noise``.
    """
    config = config or SynthConfig()
    config.validate()
    if n < 10:
        raise InvalidConfigError("n must be at least 10")
    rng = np.random.default_rng(seed)

    low = rng.random(n) < config.protected_prevalence
    income = np.where(
        low,
        rng.uniform(1000.0, INCOME_THRESHOLD, n),
        INCOME_THRESHOLD + rng.lognormal(math.log(40000.0), 0.7, n),
    )
    income = np.floor(income)

    age = np.clip(np.round(rng.normal(46.0, 16.0, n)), 18, 90)
    gender = (rng.random(n) < 0.5).astype(float)
    race = rng.integers(1, 10, n).astype(float)
    state = rng.integers(1, 57, n).astype(float)
    division = np.floor((state - 1) * 9 / 56) + 1
    region = np.floor((division - 1) / 9 * 4) + 1

    # how visibly low income leaks into the other columns
    leak = config.proxy_strength * low
    household_size = 1.0 + rng.poisson(1.4 + 0.5 * leak)
    num_children = rng.binomial((household_size - 1).astype(np.int64), 0.55).astype(float)

    frailty = (age - 18.0) / 72.0 + 0.25 * leak
    difficulties = [
        (rng.random(n) < 0.03 + 0.12 * frailty).astype(float) for _ in range(4)
    ]

    # ordinal class-of-worker code, drifting upward (toward unemployment) for low incomes
    class_of_worker = np.clip(np.round(rng.normal(3.0 + 2.5 * leak, 1.8, n)), 1, 9)

    has_interest = rng.random(n) < 0.55 - 0.4 * leak
    interest_income = np.where(has_interest, np.floor(rng.lognormal(np.log(0.02 * income + 50.0), 1.0)), 0.0)

    poverty_line = 12000.0 + 4500.0 * (household_size - 1)
    poverty_status = (income < poverty_line).astype(float)

    cols = {
        "age": age,
        "gender": gender,
        "race": race,
        "state": state,
        "division": division,
        "region": region,
        "household_size": household_size,
        "num_children": num_children,
        "hearing_difficulty": difficulties[0],
        "vision_difficulty": difficulties[1],
        "ambulatory_difficulty": difficulties[2],
        "selfcare_difficulty": difficulties[3],
        "class_of_worker": class_of_worker,
        "household_income": income,
        "interest_income": interest_income,
        "poverty_status": poverty_status,
    }
    logit = np.full(n, config.intercept)
    for name, beta in config.effects.items():
        logit += beta * _zscore(cols[name])
    label = (logit > 0).astype(float)
    flip = rng.random(n) < config.label_noise
    cols["medicaid"] = np.where(flip, 1.0 - label, label)
    return Dataset(ACS_SCHEMA, cols)
