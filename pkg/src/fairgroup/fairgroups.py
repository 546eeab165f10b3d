"""Greedy fixed-ratio matching of protected and unprotected points inside clusters."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .clustering import Clustering
from .errors import EmptyPlanError, LengthMismatchError, ZeroPartError
from .metrics import balance


@dataclass(frozen=True)
class BalanceRatio:
    """``p`` protected members for every ``q`` unprotected ones, with gcd(p, q) = 1."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ZeroPartError(f"ratio parts must be positive, got {self.p}:{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ZeroPartError(f"ratio {self.p}:{self.q} is not reduced")

    @property
    def value(self) -> float:
        return self.p / self.q

    @property
    def protected_share(self) -> float:
        return self.p / (self.p + self.q)

    def __str__(self):
        return f"{self.p}:{self.q}"


def reduce_ratio(a: int, b: int) -> BalanceRatio:
    if int(a) != a or int(b) != b:
        raise ZeroPartError("ratio parts must be integers")
    a, b = int(a), int(b)
    if a <= 0 or b <= 0:
        raise ZeroPartError(f"ratio parts must be positive, got {a}:{b}")
    g = math.gcd(a, b)
    return BalanceRatio(a // g, b // g)


@dataclass(frozen=True)
class Fairgroup:
    members: tuple[int, ...]
    protected_count: int
    unprotected_count: int
    cluster_id: int


@dataclass(frozen=True, eq=False)
class FairgroupPlan:
    groups: tuple[Fairgroup, ...]
    unmatched: np.ndarray
    ratio: BalanceRatio
    n: int

    def group_index(self) -> np.ndarray:
        """Per-point fairgroup id, -1 for unmatched points."""
        out = np.full(self.n, -1, dtype=np.int64)
        for g, grp in enumerate(self.groups):
            out[list(grp.members)] = g
        return out

    @property
    def matched(self) -> np.ndarray:
        if not self.groups:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate([np.asarray(g.members, dtype=np.int64) for g in self.groups]))

    def is_partition(self) -> bool:
        every = np.concatenate([self.matched, np.asarray(self.unmatched, dtype=np.int64)])
        return every.size == self.n and np.array_equal(np.sort(every), np.arange(self.n))


def max_group_count(n_protected: int, n_unprotected: int, ratio: BalanceRatio) -> int:
    return min(n_protected // ratio.p, n_unprotected // ratio.q)


def build_fairgroups(clustering: Clustering, protected, ratio: BalanceRatio) -> FairgroupPlan:
    """Form as many p:q fairgroups as each cluster allows.

    Within a cluster, members are taken nearest-to-center first (ties by point
    index); whatever is left over is unmatched.
    """
    flags = np.asarray(protected).astype(np.int64)
    if flags.shape != (clustering.n,):
        raise LengthMismatchError(f"{flags.size} flags for {clustering.n} points")
    groups = []
    unmatched = []
    for c in range(clustering.k):
        idx = clustering.members(c)
        order = idx[np.lexsort((idx, clustering.distances[idx]))]
        prot = order[flags[order] == 1]
        unprot = order[flags[order] == 0]
        g = max_group_count(prot.size, unprot.size, ratio)
        for i in range(g):
            members = np.concatenate(
                [prot[i * ratio.p : (i + 1) * ratio.p], unprot[i * ratio.q : (i + 1) * ratio.q]]
            )
            groups.append(Fairgroup(tuple(int(x) for x in np.sort(members)), ratio.p, ratio.q, c))
        unmatched.extend(prot[g * ratio.p :].tolist())
        unmatched.extend(unprot[g * ratio.q :].tolist())
    left = np.array(sorted(unmatched), dtype=np.int64)
    left.setflags(write=False)
    return FairgroupPlan(tuple(groups), left, ratio, clustering.n)


def plan_balance(plan: FairgroupPlan, protected) -> float:
    """Balance of the protected feature over all matched points."""
    matched = plan.matched
    if matched.size == 0:
        raise EmptyPlanError("plan has no matched points")
    return balance(np.asarray(protected)[matched])


def write_plan_csv(plan: FairgroupPlan, clustering: Clustering, protected, path, point_ids=None) -> None:
    ids = range(plan.n) if point_ids is None else point_ids
    gid = plan.group_index()
    flags = np.asarray(protected).astype(np.int64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point", "cluster", "fairgroup", "protected"])
        for j, pid in enumerate(ids):
            w.writerow([int(pid), int(clustering.assignment[j]), "unmatched" if gid[j] < 0 else int(gid[j]), int(flags[j])])
