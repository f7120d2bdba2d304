"""Trace-link scoring and aggregation.

ROC-AUC is the rank statistic (probability that a random positive outscores
a random negative, ties half), PR-AUC is trapezoidal over the threshold
sweep, summaries are mean[std] with 95% normal-approximation CIs, and the
correlation table is plain Pearson.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EvaluationError(ValueError):
    """Raised for single-class score sets, empty inputs, or length mismatches."""


def _as_arrays(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise EvaluationError("labels and scores must have equal length")
    if not np.isfinite(scores).all():
        raise EvaluationError("scores must be finite")
    return labels, scores


def roc_auc(labels, scores) -> float:
    """Mann-Whitney AUC: higher scores should mark positives."""
    labels, scores = _as_arrays(labels, scores)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("roc_auc needs at least one positive and one negative")
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    ranks = np.empty(len(scores))
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum = ranks[labels].sum()
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def _pr_points(labels: np.ndarray, scores: np.ndarray) -> list[tuple[float, float]]:
    """(recall, precision) at every distinct threshold, descending scores."""
    order = np.argsort(-scores, kind="stable")
    labels = labels[order]
    scores = scores[order]
    n_pos = int(labels.sum())
    points: list[tuple[float, float]] = []
    tp = fp = 0
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[j + 1] == scores[i]:
            j += 1
        tp += int(labels[i : j + 1].sum())
        fp += (j - i + 1) - int(labels[i : j + 1].sum())
        points.append((tp / n_pos, tp / (tp + fp)))
        i = j + 1
    return points


def pr_auc(labels, scores) -> float:
    """Trapezoidal area under the precision-recall curve."""
    labels, scores = _as_arrays(labels, scores)
    if int(labels.sum()) == 0:
        raise EvaluationError("pr_auc needs at least one positive")
    points = _pr_points(labels, scores)
    # Anchor at recall 0 with the first threshold's precision.
    curve = [(0.0, points[0][1])] + points
    area = 0.0
    for (r0, p0), (r1, p1) in zip(curve, curve[1:]):
        area += (r1 - r0) * (p0 + p1) / 2.0
    return float(area)


def average_precision(labels, scores) -> float:
    """Step-interpolated alternative to the trapezoidal PR area."""
    labels, scores = _as_arrays(labels, scores)
    if int(labels.sum()) == 0:
        raise EvaluationError("average_precision needs at least one positive")
    points = _pr_points(labels, scores)
    ap = 0.0
    prev_recall = 0.0
    for recall, precision in points:
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return float(ap)


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) != len(ys) or len(xs) < 2:
        raise EvaluationError("pearson needs two equal-length series of n >= 2")
    sx = xs - xs.mean()
    sy = ys - ys.mean()
    denom = math.sqrt(float(sx @ sx) * float(sy @ sy))
    if denom == 0.0:
        raise EvaluationError("pearson undefined for zero-variance input")
    return float(sx @ sy / denom)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    std: float  # sample std, ddof=1; 0 when n == 1
    ci95_half_width: float

    def formatted(self) -> str:
        return f"{self.mean:.2f}[{self.std:.2f}]"


def summarize(values) -> SummaryStats:
    values = np.asarray(list(values), dtype=np.float64)
    if len(values) == 0:
        raise EvaluationError("cannot summarize an empty list")
    std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return SummaryStats(
        n=len(values),
        mean=float(values.mean()),
        std=std,
        ci95_half_width=1.96 * std / math.sqrt(len(values)),
    )


def segregate_by_label(
    rows: list[dict], metrics: list[str]
) -> dict[str, dict[str, SummaryStats | None]]:
    """Summaries per metric for link vs non-link rows; rows must carry
    'is_link' plus the metric fields (None values are excluded per metric)."""
    out: dict[str, dict[str, SummaryStats | None]] = {"link": {}, "non_link": {}}
    for group, flag in (("link", True), ("non_link", False)):
        subset = [r for r in rows if r["is_link"] == flag]
        for metric in metrics:
            values = [r[metric] for r in subset if r.get(metric) is not None]
            out[group][metric] = summarize(values) if values else None
    return out


@dataclass(frozen=True)
class CorrelationCell:
    metric_a: str
    metric_b: str
    pearson_r: float | None
    n: int


def correlation_table(
    rows: list[dict],
    semantic_metrics: list[str],
    info_metrics: list[str],
) -> list[CorrelationCell]:
    """Pearson r for every (semantic, info) metric combination."""
    cells = []
    for sm in semantic_metrics:
        for im in info_metrics:
            paired = [
                (r[sm], r[im])
                for r in rows
                if r.get(sm) is not None and r.get(im) is not None
            ]
            if len(paired) < 2:
                cells.append(CorrelationCell(sm, im, None, len(paired)))
                continue
            xs, ys = zip(*paired)
            try:
                r = pearson(xs, ys)
            except EvaluationError:
                r = None
            cells.append(CorrelationCell(sm, im, r, len(paired)))
    return cells
