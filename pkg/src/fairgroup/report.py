"""Serialize experiment results: a key=value block, a one-line JSON record and
the Method / % of Poverty / Accuracy table."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import Clustering
from .errors import MissingArtifactError
from .fairgroups import Fairgroup, FairgroupPlan, reduce_ratio
from .importance import ImportanceMatrix
from .metrics import FairnessReport
from .pipeline import ExperimentResult

SCOPE = "test split"  # where the shares and accuracies are measured

METHOD_NAMES = {
    "logistic": ("Logistic Regression", "Logistic + Fairgroup"),
    "linear": ("Linear Regression", "Linear Regression + Fairgroup"),
    "svm": ("SVM", "SVM + Fairgroup"),
}


def _metric_fields(prefix: str, r: FairnessReport) -> dict:
    return {f"{prefix}.{k}": v for k, v in r.as_dict().items()}


def report_record(result: ExperimentResult) -> dict:
    """Flat dict of everything a report states; no timestamps or paths."""
    cfg = result.config
    rec = {
        "config_digest": cfg.digest(),
        "classifier": cfg.classifier,
        "protected": cfg.protected,
        "threshold": cfg.threshold,
        "ratio": str(cfg.ratio),
        "mode": cfg.mode.value,
        "k": cfg.k,
        "alpha": cfg.alpha,
        "scope": SCOPE,
        "n_test": int(result.test_index.size),
        "groups": result.groups,
        "unmatched": result.unmatched,
        "fairness_gate": "pass" if result.fairgroup.alpha_fair_positive else "fail",
    }
    rec.update(_metric_fields("baseline", result.baseline))
    rec.update(_metric_fields("fairgroup", result.fairgroup))
    return rec


def _text_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(round(v, 6))
    return str(v)


def format_text(result: ExperimentResult) -> str:
    rec = report_record(result)
    return "".join(f"{k}={_text_value(rec[k])}\n" for k in rec)


def format_json(result: ExperimentResult) -> str:
    return json.dumps(report_record(result), sort_keys=True, separators=(",", ":")) + "\n"


def format_table(result: ExperimentResult) -> str:
    base_name, fair_name = METHOD_NAMES[result.config.classifier]
    rows = [
        (base_name, result.baseline),
        (fair_name, result.fairgroup),
    ]
    width = max(len("Method"), *(len(name) for name, _ in rows))
    lines = [f"{'Method':<{width}}  % of Poverty  Accuracy"]
    for name, r in rows:
        lines.append(f"{name:<{width}}  {r.protected_share_positive:12.1f}  {r.accuracy:8.1f}")
    lines.append(f"({SCOPE}; ratio {result.config.ratio}, {result.config.mode.value}, {result.unmatched} unmatched)")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ run artifacts

ARTIFACT_FORMAT = "fairgroup-artifacts"


def artifact_record(result: ExperimentResult) -> dict:
    """Everything ``inspect`` needs, keyed by test-split position."""
    imp, cl, plan = result.importance, result.clustering, result.plan
    return {
        "format": ARTIFACT_FORMAT,
        "version": 1,
        "config_digest": result.config.digest(),
        "point_ids": result.test_index.tolist(),
        "protected": result.protected.tolist(),
        "feature_names": list(imp.feature_names),
        "correlations": imp.correlations.tolist(),
        "weights": imp.weights.tolist(),
        "ranks": imp.ranks.tolist(),
        "k": cl.k,
        "assignment": cl.assignment.tolist(),
        "centers": cl.centers.tolist(),
        "distances": cl.distances.tolist(),
        "iterations": cl.iterations,
        "cost_history": list(cl.cost_history),
        "ratio": [plan.ratio.p, plan.ratio.q],
        "groups": [[list(g.members), g.protected_count, g.unprotected_count, g.cluster_id] for g in plan.groups],
        "unmatched": plan.unmatched.tolist(),
        "representatives": result.prediction.representatives.tolist(),
        "baseline_labels": result.baseline_labels.tolist(),
        "fairgroup_labels": result.prediction.labels.tolist(),
    }


def save_artifacts(result: ExperimentResult, path) -> None:
    Path(path).write_text(json.dumps(artifact_record(result), sort_keys=True) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class RunArtifacts:
    point_ids: np.ndarray
    protected: np.ndarray
    importance: ImportanceMatrix
    clustering: Clustering
    plan: FairgroupPlan
    representatives: np.ndarray
    baseline_labels: np.ndarray
    fairgroup_labels: np.ndarray


def load_artifacts(path) -> RunArtifacts:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"no run artifacts at {path}; run the experiment first")
    rec = json.loads(path.read_text(encoding="utf-8"))
    if rec.get("format") != ARTIFACT_FORMAT:
        raise MissingArtifactError(f"{path} is not a fairgroup artifact file")
    ints = lambda key: np.asarray(rec[key], dtype=np.int64)
    n = len(rec["point_ids"])
    imp = ImportanceMatrix(
        tuple(rec["feature_names"]),
        np.asarray(rec["correlations"], dtype=np.float64),
        ints("weights"),
        np.asarray(rec["ranks"], dtype=np.int64).reshape(n, len(rec["feature_names"])),
    )
    cl = Clustering(
        rec["k"],
        ints("assignment"),
        np.asarray(rec["centers"], dtype=np.float64),
        np.asarray(rec["distances"], dtype=np.float64),
        rec["iterations"],
        tuple(rec["cost_history"]),
    )
    groups = tuple(Fairgroup(tuple(m), p, q, c) for m, p, q, c in rec["groups"])
    plan = FairgroupPlan(groups, ints("unmatched"), reduce_ratio(*rec["ratio"]), n)
    return RunArtifacts(
        ints("point_ids"), ints("protected"), imp, cl, plan,
        ints("representatives"), ints("baseline_labels"), ints("fairgroup_labels"),
    )
