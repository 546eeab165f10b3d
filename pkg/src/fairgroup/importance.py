"""Correlation-weighted rank features.

Each unprotected feature gets an integer weight from the rank of its absolute
correlation with the target, and each point gets a per-feature rank. Their
product is the point's importance index for that feature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import LengthMismatchError, TooFewPointsError


@dataclass(frozen=True, eq=False)
class ImportanceMatrix:
    feature_names: tuple[str, ...]
    correlations: np.ndarray  # (N,) signed
    weights: np.ndarray  # (N,) permutation of 1..N
    ranks: np.ndarray  # (n, N), each column a permutation of 1..n

    @property
    def importance(self) -> np.ndarray:
        return self.ranks * self.weights

    @property
    def n(self) -> int:
        return self.ranks.shape[0]


def pearson(x, y) -> float:
    """Population-moment Pearson correlation; 0.0 when either input is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(f"lengths differ: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise TooFewPointsError("pearson needs at least two points")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    vx = np.mean(dx * dx)
    vy = np.mean(dy * dy)
    if vx == 0.0 or vy == 0.0:
        return 0.0
    r = np.mean(dx * dy) / np.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def weights_from_correlations(corrs) -> np.ndarray:
    """Weight 1 for the smallest |corr| up to N for the largest; ties keep position order."""
    a = np.abs(np.asarray(corrs, dtype=np.float64))
    order = np.argsort(a, kind="stable")
    w = np.empty(a.size, dtype=np.int64)
    w[order] = np.arange(1, a.size + 1)
    return w


def rank_column(x, positive: bool = True) -> np.ndarray:
    """Rank 1 goes to the largest value (``positive``) or the smallest (not).

    Ties are broken by point index, lower index first.
    """
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(-x if positive else x, kind="stable")
    r = np.empty(x.size, dtype=np.int64)
    r[order] = np.arange(1, x.size + 1)
    return r


def build_importance(d: Dataset) -> ImportanceMatrix:
    names = tuple(d.unprotected_names)
    if not names:
        raise LengthMismatchError("dataset has no unprotected features")
    y = d.target
    corrs = np.array([pearson(d.column(nm), y) for nm in names])
    weights = weights_from_correlations(corrs)
    # zero correlation ranks as if positive
    ranks = np.column_stack([rank_column(d.column(nm), c >= 0) for nm, c in zip(names, corrs)])
    for a in (corrs, weights, ranks):
        a.setflags(write=False)
    return ImportanceMatrix(names, corrs, weights, ranks)


def write_feature_csv(m: ImportanceMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "correlation", "weight"])
        for name, c, wt in zip(m.feature_names, m.correlations, m.weights):
            w.writerow([name, repr(float(c)), int(wt)])


def write_point_csv(m: ImportanceMatrix, path, point_ids=None) -> None:
    """One row per point: its id followed by its importance vector."""
    ids = range(m.n) if point_ids is None else point_ids
    imp = m.importance
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point", *m.feature_names])
        for j, pid in enumerate(ids):
            w.writerow([int(pid), *(int(v) for v in imp[j])])
