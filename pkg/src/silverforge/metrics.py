"""Evaluation metrics and baselines for sentence-pair tasks.

Regression tasks are scored with Spearman rank correlation; classification
tasks with F1 of the positive class at a threshold tuned on development
data. Partial ROC area up to a false-positive-rate cap, normalized so a
perfect ranker scores 1, serves the retrieval-style evaluations.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .bm25 import tokenize


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    sx = x[order]
    ranks = np.empty(len(x), dtype=np.float64)
    start = 0
    while start < len(sx):
        stop = start
        while stop + 1 < len(sx) and sx[stop + 1] == sx[start]:
            stop += 1
        ranks[order[start : stop + 1]] = (start + stop) / 2.0 + 1.0
        start = stop + 1
    return ranks


def spearman(pred: Sequence[float], gold: Sequence[float]) -> float:
    """Spearman's rank correlation: Pearson correlation of average ranks."""
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gold, dtype=np.float64)
    if p.shape != g.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {g.shape}")
    if len(p) < 2:
        raise ValueError("need at least 2 observations")
    if np.ptp(p) == 0.0 or np.ptp(g) == 0.0:
        raise ValueError("rank correlation undefined for constant input")
    rp = average_ranks(p)
    rg = average_ranks(g)
    rp -= rp.mean()
    rg -= rg.mean()
    return float(np.dot(rp, rg) / np.sqrt(np.dot(rp, rp) * np.dot(rg, rg)))


def _as_binary(labels: Sequence[int], name: str) -> np.ndarray:
    arr = np.asarray(labels)
    if not np.all(np.isin(arr, (0, 1))):
        raise ValueError(f"{name} must contain only 0/1 labels")
    return arr.astype(np.int64)


def f1_positive(pred: Sequence[int], gold: Sequence[int]) -> float:
    """F1 of the positive label, 0 by convention when the denominator is 0."""
    p = _as_binary(pred, "pred")
    g = _as_binary(gold, "gold")
    if p.shape != g.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {g.shape}")
    tp = int(np.sum((p == 1) & (g == 1)))
    fp = int(np.sum((p == 1) & (g == 0)))
    fn = int(np.sum((p == 0) & (g == 1)))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def threshold_search(scores: Sequence[float], gold: Sequence[int]) -> tuple[float, float]:
    """Threshold maximizing F1 on the given (development) data.

    Candidates are all midpoints between adjacent sorted unique scores
    plus 0 and 1; a score >= threshold predicts positive. Ties are broken
    toward the smallest threshold.
    """
    s = np.asarray(scores, dtype=np.float64)
    g = _as_binary(gold, "gold")
    if s.shape != g.shape or s.ndim != 1:
        raise ValueError(f"length mismatch: {s.shape} vs {g.shape}")
    if len(np.unique(g)) < 2:
        raise ValueError("threshold search needs both classes in gold")
    uniq = np.unique(s)
    midpoints = (uniq[:-1] + uniq[1:]) / 2.0
    candidates = sorted(set(midpoints.tolist()) | {0.0, 1.0})
    best_t, best_f1 = 0.0, -1.0
    for t in candidates:
        f1 = f1_positive((s >= t).astype(int), g)
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t, best_f1


def roc_points(scores: Sequence[float], gold: Sequence[int]) -> list[tuple[float, float]]:
    """ROC vertices from a descending-score sweep, tie groups atomic.

    Returns (fpr, tpr) points starting at (0, 0) and ending at (1, 1).
    """
    s = np.asarray(scores, dtype=np.float64)
    g = _as_binary(gold, "gold")
    if s.shape != g.shape or s.ndim != 1:
        raise ValueError(f"length mismatch: {s.shape} vs {g.shape}")
    pos = int(np.sum(g == 1))
    neg = int(np.sum(g == 0))
    if pos == 0 or neg == 0:
        raise ValueError("ROC needs both classes in gold")
    points = [(0.0, 0.0)]
    tp = fp = 0
    for value in np.unique(s)[::-1]:
        group = s == value
        tp += int(np.sum(g[group] == 1))
        fp += int(np.sum(g[group] == 0))
        points.append((fp / neg, tp / pos))
    return points


def auc_at(fpr_cap: float, scores: Sequence[float], gold: Sequence[int]) -> float:
    """Partial ROC area on [0, fpr_cap], normalized by the cap.

    Area is integrated with trapezoids over the ROC vertices, linearly
    interpolating the curve at the cap, so a perfect ranker scores 1.0
    for any cap.
    """
    if not 0.0 < fpr_cap <= 1.0:
        raise ValueError("fpr_cap must be in (0, 1]")
    points = roc_points(scores, gold)
    area = 0.0
    for (f0, t0), (f1, t1) in zip(points, points[1:]):
        if f1 <= fpr_cap:
            area += (f1 - f0) * (t0 + t1) / 2.0
        else:
            if f0 < fpr_cap:
                t_cap = t0 + (t1 - t0) * (fpr_cap - f0) / (f1 - f0)
                area += (fpr_cap - f0) * (t0 + t_cap) / 2.0
            break
    return area / fpr_cap


def jaccard_baseline(a: str, b: str) -> float:
    """Token-set overlap of the two sentences; both empty scores 1.0."""
    ta, tb = set(tokenize(a)), set(tokenize(b))
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def majority_baseline(train_labels: Sequence[int]) -> int:
    """The more frequent train label; ties go to the positive class."""
    g = _as_binary(train_labels, "train_labels")
    if len(g) == 0:
        raise ValueError("majority baseline needs a nonempty training set")
    positives = int(np.sum(g == 1))
    return 1 if positives >= len(g) - positives else 0
