"""Lloyd-style k-medians on feature importance vectors under the L1 distance."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BadKError, LengthMismatchError

DEFAULT_MAX_ITERS = 100
DEFAULT_N_INIT = 20


@dataclass(frozen=True, eq=False)
class Clustering:
    k: int
    assignment: np.ndarray  # (n,) cluster id per point
    centers: np.ndarray  # (k, N)
    distances: np.ndarray  # (n,) L1 distance of each point to its center
    iterations: int = 0
    cost_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def cost(self) -> float:
        return float(self.distances.sum())

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)


def l1_distance(p, q, weights=None) -> float:
    """``sum_i w_i |p_i - q_i|`` (unit weights by default)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatchError(f"lengths differ: {p.shape} vs {q.shape}")
    diff = np.abs(p - q)
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != p.shape:
            raise LengthMismatchError("weights length differs from vectors")
        diff = diff * weights
    return float(diff.sum())


def pairwise_l1(X, C) -> np.ndarray:
    """(n, k) matrix of L1 distances between rows of X and rows of C."""
    out = np.empty((X.shape[0], C.shape[0]))
    for c in range(C.shape[0]):
        out[:, c] = np.abs(X - C[c]).sum(axis=1)
    return out


def lower_median(values: np.ndarray) -> np.ndarray:
    """Coordinate-wise median taking the lower middle on even counts."""
    s = np.sort(values, axis=0)
    return s[(s.shape[0] - 1) // 2]


def _seed_centers(X, k, rng):
    # distance-weighted seeding: next center drawn with probability ∝ L1 distance
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    nearest = np.abs(X - X[chosen[0]]).sum(axis=1)
    for _ in range(1, k):
        total = nearest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=nearest / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        nearest = np.minimum(nearest, np.abs(X - X[idx]).sum(axis=1))
    return X[chosen].astype(np.float64)


def _assign(X, centers):
    D = pairwise_l1(X, centers)
    a = np.argmin(D, axis=1)  # first minimum -> lowest center id
    return a, D[np.arange(X.shape[0]), a]


def _update(X, assignment, dist, centers):
    k = centers.shape[0]
    new = centers.copy()
    empty = []
    for c in range(k):
        mask = assignment == c
        if mask.any():
            new[c] = lower_median(X[mask])
        else:
            empty.append(c)
    if empty:
        used = set()
        for c in empty:
            # reseed on the point farthest from its own center
            order = np.argsort(-dist, kind="stable")
            idx = next(int(j) for j in order if int(j) not in used)
            used.add(idx)
            new[c] = X[idx]
    return new


def _lloyd(X, k, rng, max_iters):
    centers = _seed_centers(X, k, rng)
    assignment, dist = _assign(X, centers)
    history = [float(dist.sum())]
    iterations = 0
    for _ in range(max_iters):
        iterations += 1
        centers = _update(X, assignment, dist, centers)
        new_assignment, dist = _assign(X, centers)
        history.append(float(dist.sum()))
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return new_assignment, centers, dist, iterations, history


def kmedians(m, k: int, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS, n_init: int = DEFAULT_N_INIT) -> Clustering:
    """Cluster the rows of ``m`` (an ImportanceMatrix or an (n, N) array) into k groups.

    Alternates nearest-center assignment with coordinate-wise median updates
    until the assignment stops changing or ``max_iters`` updates have run.
    This is repeated from ``n_init`` seedings drawn from one generator, and the
    lowest-cost run is kept (the earliest on ties).
    """
    X = np.asarray(getattr(m, "importance", m), dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if int(k) != k or k < 1 or k > n:
        raise BadKError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    if max_iters < 1:
        raise BadKError("max_iters must be positive")
    if int(n_init) != n_init or n_init < 1:
        raise BadKError("n_init must be a positive integer")
    k = int(k)
    rng = np.random.default_rng(seed)

    best = None
    for _ in range(int(n_init)):
        run = _lloyd(X, k, rng, max_iters)
        if best is None or run[2].sum() < best[2].sum():
            best = run
    assignment, centers, dist, iterations, history = best
    for a in (assignment, centers, dist):
        a.setflags(write=False)
    return Clustering(k, assignment, centers, dist, iterations, tuple(history))


def write_assignment_csv(cl: Clustering, path, point_ids=None) -> None:
    ids = range(cl.n) if point_ids is None else point_ids
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point", "cluster"])
        for pid, c in zip(ids, cl.assignment):
            w.writerow([int(pid), int(c)])
