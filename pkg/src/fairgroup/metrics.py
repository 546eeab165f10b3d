"""Balance, alpha-fairness and the per-method fairness/accuracy report."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidConfigError, LengthMismatchError


def balance(protected) -> float:
    """``min(#0/#1, #1/#0)`` of a binary vector; 0 when either class is absent."""
    a = np.asarray(protected).astype(np.int64)
    ones = int(a.sum())
    zeros = a.size - ones
    if ones == 0 or zeros == 0:
        return 0.0
    return min(zeros / ones, ones / zeros)


def is_alpha_fair(protected, alpha: float) -> bool:
    return balance(protected) >= alpha


@dataclass(frozen=True)
class FairnessReport:
    n: int
    positives: int
    accuracy: float  # percent
    protected_share_positive: float  # percent
    positive_class_balance: float
    negative_class_balance: float
    alpha: float
    alpha_fair_positive: bool
    alpha_fair_negative: bool
    degenerate: bool  # no predicted positives

    @property
    def alpha_fair(self) -> dict[int, bool]:
        return {1: self.alpha_fair_positive, 0: self.alpha_fair_negative}

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(pred, truth, protected, alpha: float = 0.25) -> FairnessReport:
    pred = np.asarray(pred).astype(np.int64)
    truth = np.asarray(truth).astype(np.int64)
    flags = np.asarray(protected).astype(np.int64)
    if not (pred.shape == truth.shape == flags.shape) or pred.ndim != 1:
        raise LengthMismatchError("pred, truth and protected flags must have equal length")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidConfigError("alpha must lie in [0, 1]")
    n = pred.size
    pos = pred == 1
    positives = int(pos.sum())
    share = 100.0 * int((flags[pos] == 1).sum()) / positives if positives else 0.0
    bal_pos = balance(flags[pos])
    bal_neg = balance(flags[~pos])
    return FairnessReport(
        n=n,
        positives=positives,
        accuracy=100.0 * float(np.mean(pred == truth)) if n else 0.0,
        protected_share_positive=share,
        positive_class_balance=bal_pos,
        negative_class_balance=bal_neg,
        alpha=float(alpha),
        alpha_fair_positive=bal_pos >= alpha,
        alpha_fair_negative=bal_neg >= alpha,
        degenerate=positives == 0,
    )
