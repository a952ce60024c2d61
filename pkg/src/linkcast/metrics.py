"""Tie-aware AUC and binary cross-entropy evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

#: Probabilities are clamped to [CLAMP, 1 - CLAMP] before taking logs.
CLAMP = 1e-15


@dataclass
class ScoredPairs:
    """Candidate pairs with model scores and, optionally, ground truth."""

    pairs: np.ndarray  # (n, 2) int
    scores: np.ndarray  # (n,) float
    labels: np.ndarray | None = None  # (n,) in {0, 1}

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape[0] != self.pairs.shape[0]:
            raise ValueError("pairs and scores must have equal length")
        if not np.isfinite(self.scores).all():
            raise ValueError("scores must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != self.scores.shape:
                raise ValueError("labels and scores must have equal length")
            if not np.isin(self.labels, (0, 1)).all():
                raise ValueError("labels must be 0 or 1")


def auc(scores, labels) -> float:
    """Area under the ROC curve via average ranks (ties count one half).

    Equivalent to the probability that a uniformly random positive outranks
    a uniformly random negative; O(n log n).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-d arrays of equal length")
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    pos = int(np.count_nonzero(labels == 1))
    neg = int(np.count_nonzero(labels == 0))
    if pos + neg != labels.size:
        raise ValueError("labels must be 0 or 1")
    if pos == 0 or neg == 0:
        raise ValueError("need at least one positive and one negative label")
    ranks = rankdata(scores, method="average")
    rank_sum = float(ranks[labels == 1].sum())
    u_stat = rank_sum - pos * (pos + 1) / 2.0
    return u_stat / (pos * neg)


def logloss(scores, labels) -> float:
    """Mean binary cross-entropy, with probabilities clamped at 1e-15."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-d arrays of equal length")
    if scores.size == 0:
        raise ValueError("need at least one sample")
    p = np.clip(scores, CLAMP, 1.0 - CLAMP)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log1p(-p)))
