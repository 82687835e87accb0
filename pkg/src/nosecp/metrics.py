"""Evaluation metrics for estimated change-point sets."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["precision_recall", "hausdorff_scaled", "khat_table", "KHAT_LABELS"]

KHAT_LABELS = ("<=-3", "-2", "-1", "0", "+1", "+2", ">=+3")


def precision_recall(truth, estimated, window: int):
    """Windowed precision/recall of an estimated change-point set.

    A true change-point counts as one true positive if at least one estimate
    lies within ``window`` of it; false positives are the surplus estimates,
    clamped at zero when a single estimate serves several true points.

    Returns ``(precision, recall, TP, FP)``.
    """
    if window < 0:
        raise DomainError("window must be non-negative")
    truth = np.asarray(truth, dtype=np.int64)
    estimated = np.asarray(estimated, dtype=np.int64)
    tp = 0
    for t in truth:
        if estimated.size and np.min(np.abs(estimated - t)) <= window:
            tp += 1
    fp = max(0, estimated.size - tp)
    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    recall = tp / truth.size if truth.size else 1.0
    return precision, recall, tp, fp


def hausdorff_scaled(truth, estimated, n: int) -> float:
    """Two-sided Hausdorff distance between the sets, scaled by ``n``.

    Both sets are augmented with the endpoints 0 and ``n`` so an empty
    estimate is penalised by its distance to the data boundary rather than
    being undefined.
    """
    if n <= 0:
        raise DomainError("n must be positive")
    a = np.unique(np.concatenate(([0, n], np.asarray(truth, dtype=np.float64))))
    b = np.unique(np.concatenate(([0, n], np.asarray(estimated, dtype=np.float64))))
    d_ab = max(np.min(np.abs(b - x)) for x in a)
    d_ba = max(np.min(np.abs(a - x)) for x in b)
    return float(max(d_ab, d_ba) / n)


def khat_table(results) -> np.ndarray:
    """Bin estimated-minus-true change-point counts into seven buckets.

    ``results`` is a sequence of ``(khat, k)`` pairs; the buckets are
    ``<=-3, -2, -1, 0, +1, +2, >=+3`` (see :data:`KHAT_LABELS`).
    """
    results = list(results)
    if not results:
        raise DomainError("need at least one result")
    counts = np.zeros(7, dtype=np.int64)
    for khat, k in results:
        diff = int(khat) - int(k)
        counts[min(max(diff, -3), 3) + 3] += 1
    return counts
