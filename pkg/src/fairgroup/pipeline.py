"""Fair classification through fairgroup representatives, and the end-to-end
baseline-vs-fairgroup experiment."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .classifiers import LinearModel, predict, train
from .clustering import Clustering, kmedians
from .dataset import (
    ACS_SCHEMA,
    Dataset,
    binarize_protected,
    infer_specs,
    load_csv,
    set_protected,
    synth_acs,
)
from .errors import DataError, EmptyGroupError, InvalidConfigError, LengthMismatchError
from .fairgroups import FairgroupPlan, build_fairgroups
from .importance import ImportanceMatrix, build_importance
from .metrics import FairnessReport, evaluate

if TYPE_CHECKING:
    from .config import ExperimentConfig

log = logging.getLogger(__name__)


class PropagationMode(str, enum.Enum):
    """What a negative representative means for the rest of its fairgroup.

    ``ONE_SIDED``: the protected feature only matters in the positive class, so
    the other members are classified on their own. ``TWO_SIDED``: the negative
    label is propagated like a positive one.
    """

    ONE_SIDED = "one-sided"
    TWO_SIDED = "two-sided"

    @classmethod
    def parse(cls, value) -> "PropagationMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidConfigError(f"mode: expected one-sided or two-sided, got {value!r}") from None


INDIVIDUAL = "individual"
REPRESENTATIVE = "representative"
PROPAGATED = "propagated"


@dataclass(frozen=True, eq=False)
class FairPrediction:
    labels: np.ndarray  # (n,) in {0, 1}
    provenance: np.ndarray  # (n,) of INDIVIDUAL / REPRESENTATIVE / PROPAGATED
    group: np.ndarray  # (n,) fairgroup id or -1
    representatives: np.ndarray  # (G,) point index of each group's representative
    seed: int


def fair_classify(model: LinearModel, d: Dataset, plan: FairgroupPlan, mode=PropagationMode.ONE_SIDED, seed: int = 0) -> FairPrediction:
    """Label every point of ``d`` using one random representative per fairgroup.

    A positive representative makes its whole group positive. A negative one
    makes the group negative in two-sided mode; in one-sided mode the other
    members are classified individually. Unmatched points are always
    classified individually.
    """
    mode = PropagationMode.parse(mode)
    if plan.n != d.n:
        raise LengthMismatchError(f"plan covers {plan.n} points, dataset has {d.n}")
    direct = predict(model, d)  # each row is scored independently of the others
    rng = np.random.default_rng(seed)

    labels = direct.copy()
    provenance = np.full(d.n, INDIVIDUAL, dtype=object)
    group = np.full(d.n, -1, dtype=np.int64)
    reps = np.empty(len(plan.groups), dtype=np.int64)
    for g, grp in enumerate(plan.groups):
        if not grp.members:
            raise EmptyGroupError(f"fairgroup {g} has no members")
        members = np.asarray(grp.members, dtype=np.int64)
        rep = int(members[rng.integers(members.size)])
        reps[g] = rep
        group[members] = g
        rep_label = direct[rep]
        provenance[rep] = REPRESENTATIVE
        others = members[members != rep]
        if rep_label == 1 or mode is PropagationMode.TWO_SIDED:
            labels[others] = rep_label
            provenance[others] = PROPAGATED
    labels.setflags(write=False)
    return FairPrediction(labels, provenance, group, reps, seed)


# ------------------------------------------------------------ experiments


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: "ExperimentConfig"
    baseline: FairnessReport
    fairgroup: FairnessReport
    model: LinearModel
    test_index: np.ndarray  # rows of the prepared dataset forming the test split
    importance: ImportanceMatrix
    clustering: Clustering
    plan: FairgroupPlan
    prediction: FairPrediction
    protected: np.ndarray  # test-split protected flags
    baseline_labels: np.ndarray

    @property
    def unmatched(self) -> int:
        return int(self.plan.unmatched.size)

    @property
    def groups(self) -> int:
        return len(self.plan.groups)

    @property
    def baseline_accuracy(self) -> float:
        return self.baseline.accuracy

    @property
    def baseline_protected_share_positive(self) -> float:
        return self.baseline.protected_share_positive


def load_dataset(cfg: "ExperimentConfig") -> Dataset:
    """Load or generate the raw data named by ``cfg`` and select its protected feature."""
    if cfg.data is None:
        d = synth_acs(cfg.n, cfg.seed_synth, cfg.synth_config())
    else:
        specs = infer_specs(cfg.data, cfg.target)
        if [s.name for s in specs] == [s.name for s in ACS_SCHEMA]:
            specs = ACS_SCHEMA
        d = load_csv(cfg.data, specs)
    return select_protected(d, cfg.protected, cfg.threshold)


def select_protected(d: Dataset, feature: str, threshold: float | None) -> Dataset:
    if threshold is not None and d.spec(feature).kind == "numeric":
        return binarize_protected(d, feature, threshold)
    return set_protected(d, feature)


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded uniform split; both parts are returned in ascending row order."""
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(n * train_fraction))
    n_train = min(max(n_train, 2), n - 1)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def run_experiment(d: Dataset, cfg: "ExperimentConfig") -> ExperimentResult:
    """Train on a seeded split, then score the test split directly and through fairgroups."""
    if d.protected_name is None:
        raise DataError("dataset needs a protected feature; see select_protected")
    train_idx, test_idx = split_indices(d.n, cfg.split, cfg.seed_split)
    train_set, test_set = d.take(train_idx), d.take(test_idx)
    model = train(train_set, cfg.train_config())

    flags = test_set.protected
    truth = test_set.target
    base_labels = predict(model, test_set)
    baseline = evaluate(base_labels, truth, flags, cfg.alpha)

    imp = build_importance(test_set)
    cl = kmedians(imp, cfg.k, cfg.seed_cluster, cfg.max_iters, cfg.n_init)
    plan = build_fairgroups(cl, flags, cfg.ratio)
    pred = fair_classify(model, test_set, plan, cfg.mode, cfg.seed_repr)
    fair = evaluate(pred.labels, truth, flags, cfg.alpha)
    log.info(
        "%s: %d groups, %d unmatched, baseline %.1f%%/%.1f%%, fairgroup %.1f%%/%.1f%%",
        cfg.classifier, len(plan.groups), plan.unmatched.size,
        baseline.protected_share_positive, baseline.accuracy,
        fair.protected_share_positive, fair.accuracy,
    )
    return ExperimentResult(cfg, baseline, fair, model, test_idx, imp, cl, plan, pred, flags, base_labels)
