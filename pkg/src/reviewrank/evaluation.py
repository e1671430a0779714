"""Regression metrics, k-fold cross-validation, and ROC/AUC for the merge model.

Cross-validation refits the bin thresholds on each training fold when the
rows carry raw factor readings, so no discretization information leaks from
held-out folds. Rows without raws (already-discretized datasets) are scored
on their stored categories.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .binning import categorize, fit_bins
from .bn import (
    AGE_STATES,
    PATCHES_STATES,
    SIZE_STATES,
    NetworkStructure,
    default_structure,
    infer_merge_probability,
    learn_cpts,
)
from .errors import DegenerateEvidenceError
from .factors import (
    FactorVector,
    evidence_from,
    outcome_as_number,
    training_assignment,
)

FALLBACK_PROBABILITY = 0.5


@dataclass(frozen=True)
class FoldMetrics:
    rmse: float
    mae: float


@dataclass(frozen=True)
class Confusion:
    """Counts after rounding probabilities at 0.5 (merged is the positive class)."""

    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    folds: int
    seed: int
    per_fold: tuple[FoldMetrics, ...]
    aggregate_rmse: float
    aggregate_mae: float
    pooled_rmse: float
    pooled_mae: float
    roc_points: tuple[tuple[float, float], ...]
    auc: float
    confusion_at_half: Confusion

    def to_json(self) -> str:
        doc = {
            "folds": self.folds,
            "seed": self.seed,
            "per_fold": [{"rmse": f.rmse, "mae": f.mae} for f in self.per_fold],
            "aggregate_rmse": self.aggregate_rmse,
            "aggregate_mae": self.aggregate_mae,
            "pooled_rmse": self.pooled_rmse,
            "pooled_mae": self.pooled_mae,
            "roc_points": [[fpr, tpr] for fpr, tpr in self.roc_points],
            "auc": self.auc,
            "confusion_at_half": {
                "tp": self.confusion_at_half.tp,
                "fp": self.confusion_at_half.fp,
                "tn": self.confusion_at_half.tn,
                "fn": self.confusion_at_half.fn,
            },
        }
        return json.dumps(doc, indent=2) + "\n"


def _check_vectors(predicted: Sequence[float], actual: Sequence[float]) -> None:
    if len(predicted) != len(actual):
        raise ValueError(f"length mismatch: {len(predicted)} predicted, {len(actual)} actual")
    if not predicted:
        raise ValueError("empty input vectors")


def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Square root of the mean squared prediction error."""
    _check_vectors(predicted, actual)
    diff = np.asarray(predicted, dtype=float) - np.asarray(actual, dtype=float)
    return float(np.sqrt(np.mean(diff**2)))


def mae(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Mean absolute prediction error."""
    _check_vectors(predicted, actual)
    diff = np.asarray(actual, dtype=float) - np.asarray(predicted, dtype=float)
    return float(np.mean(np.abs(diff)))


def kfold_split(n: int, k: int, seed: int) -> list[list[int]]:
    """Partition indices 0..n-1 into k folds whose sizes differ by at most one."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available rows")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    base, extra = divmod(n, k)
    folds: list[list[int]] = []
    start = 0
    for fold_number in range(k):
        size = base + (1 if fold_number < extra else 0)
        folds.append(sorted(indices[start : start + size]))
        start += size
    return folds


def roc_auc(
    predicted: Sequence[float], actual: Sequence[int]
) -> tuple[list[tuple[float, float]], float]:
    """ROC points from a threshold sweep over distinct scores, AUC by trapezoid.

    The result equals the Mann-Whitney pair statistic with ties counted 1/2.
    """
    _check_vectors(predicted, actual)
    labels = [int(a) for a in actual]
    positives = sum(labels)
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise ValueError("ROC needs both classes present in the labels")
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    for threshold in sorted(set(predicted), reverse=True):
        tp = sum(1 for p, y in zip(predicted, labels) if y == 1 and p >= threshold)
        fp = sum(1 for p, y in zip(predicted, labels) if y == 0 and p >= threshold)
        points.append((fp / negatives, tp / positives))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return points, area


def predict_rows(
    model, rows: Sequence[FactorVector]
) -> list[float]:
    """Merge probability for each row under full factor evidence; 0.5 on degenerate evidence."""
    predictions = []
    for row in rows:
        try:
            predictions.append(infer_merge_probability(model, evidence_from(row)))
        except DegenerateEvidenceError:
            predictions.append(FALLBACK_PROBABILITY)
    return predictions


def _fold_rows(rows: Sequence[FactorVector], bins) -> list[FactorVector]:
    rebinned = []
    for row in rows:
        rebinned.append(
            replace(
                row,
                age_cat=categorize(row.age_minutes, bins.age_minutes, AGE_STATES),
                size_cat=categorize(row.size_lines, bins.size_lines, SIZE_STATES),
                patches_cat=categorize(row.revision_count, bins.revision_count, PATCHES_STATES),
            )
        )
    return rebinned


def cross_validate(
    rows: Sequence[FactorVector],
    structure: NetworkStructure | None = None,
    alpha: float = 1.0,
    k: int = 5,
    seed: int = 0,
) -> EvalReport:
    """k-fold cross-validation of the merge model over closed changes.

    Each fold trains on the remaining rows and scores held-out merge
    probabilities against outcomes encoded merged=1 / abandoned=0. The report
    carries per-fold and mean metrics, pooled metrics over all out-of-fold
    predictions, the pooled ROC curve with trapezoidal AUC, and the rounded
    confusion counts.
    """
    if structure is None:
        structure = default_structure()
    open_rows = [r.change_id for r in rows if r.outcome is None]
    if open_rows:
        raise ValueError(f"dataset contains open changes without outcomes: {open_rows[:5]}")
    if len(rows) < k:
        raise ValueError(f"dataset has {len(rows)} rows; need at least k={k}")

    refit_bins = all(r.has_raw_values for r in rows)
    folds = kfold_split(len(rows), k, seed)
    per_fold: list[FoldMetrics] = []
    pooled_predicted: list[float] = []
    pooled_actual: list[float] = []
    for held_out in folds:
        held = set(held_out)
        train_rows = [rows[i] for i in range(len(rows)) if i not in held]
        test_rows = [rows[i] for i in held_out]
        if refit_bins:
            bins = fit_bins(
                [r.age_minutes for r in train_rows],
                [r.size_lines for r in train_rows],
                [r.revision_count for r in train_rows],
            )
            train_rows = _fold_rows(train_rows, bins)
            test_rows = _fold_rows(test_rows, bins)
        model = learn_cpts(
            [training_assignment(r) for r in train_rows], structure, alpha
        )
        predicted = predict_rows(model, test_rows)
        actual = [outcome_as_number(r) for r in test_rows]
        per_fold.append(FoldMetrics(rmse=rmse(predicted, actual), mae=mae(predicted, actual)))
        pooled_predicted.extend(predicted)
        pooled_actual.extend(actual)

    roc_points, auc = roc_auc(pooled_predicted, [int(a) for a in pooled_actual])
    tp = sum(1 for p, a in zip(pooled_predicted, pooled_actual) if p >= 0.5 and a == 1.0)
    fp = sum(1 for p, a in zip(pooled_predicted, pooled_actual) if p >= 0.5 and a == 0.0)
    tn = sum(1 for p, a in zip(pooled_predicted, pooled_actual) if p < 0.5 and a == 0.0)
    fn = sum(1 for p, a in zip(pooled_predicted, pooled_actual) if p < 0.5 and a == 1.0)
    return EvalReport(
        folds=k,
        seed=seed,
        per_fold=tuple(per_fold),
        aggregate_rmse=float(np.mean([f.rmse for f in per_fold])),
        aggregate_mae=float(np.mean([f.mae for f in per_fold])),
        pooled_rmse=rmse(pooled_predicted, pooled_actual),
        pooled_mae=mae(pooled_predicted, pooled_actual),
        roc_points=tuple(roc_points),
        auc=auc,
        confusion_at_half=Confusion(tp=tp, fp=fp, tn=tn, fn=fn),
    )
