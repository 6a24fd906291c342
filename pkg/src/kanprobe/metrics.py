"""Multiclass classification metrics from a confusion matrix.

Conventions: per-class F1 is 0 whenever its precision + recall denominator
is 0 (classes absent from both predictions and labels included); micro-F1
in single-label multiclass equals accuracy; Cohen's kappa is 0 when the
expected agreement is 1 (degenerate single-cell matrices).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ConfusionMatrix:
    """counts[i, j] = rows with true class i predicted as class j."""

    counts: np.ndarray
    n_classes: int

    @property
    def n(self) -> int:
        return int(self.counts.sum())


@dataclass
class MetricsReport:
    accuracy: float
    macro_f1: float
    micro_f1: float
    kappa: float
    per_class_f1: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "kappa": self.kappa,
            "per_class_f1": list(self.per_class_f1),
        }


def confusion_matrix(preds, labels, n_classes: int) -> ConfusionMatrix:
    """Tally a (n_classes, n_classes) count matrix indexed [true, predicted]."""
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise ValueError(
            f"preds and labels must be equal-length vectors, got {preds.shape} "
            f"and {labels.shape}"
        )
    if n_classes < 1:
        raise ValueError(f"n_classes must be >= 1, got {n_classes}")
    for name, v in (("preds", preds), ("labels", labels)):
        if v.size and (v.min() < 0 or v.max() >= n_classes):
            raise ValueError(
                f"{name} must lie in [0, {n_classes}), got range "
                f"[{v.min()}, {v.max()}]"
            )
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (labels, preds), 1)
    return ConfusionMatrix(counts=counts, n_classes=n_classes)


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, macro/micro F1, Cohen's kappa, and per-class F1 from counts."""
    counts = cm.counts
    n = counts.sum()
    if n == 0:
        raise ValueError("confusion matrix is empty")
    diag = np.diag(counts).astype(np.float64)
    true_per_class = counts.sum(axis=1).astype(np.float64)  # support
    pred_per_class = counts.sum(axis=0).astype(np.float64)
    accuracy = float(diag.sum() / n)

    f1 = np.zeros(cm.n_classes)
    denom = true_per_class + pred_per_class  # = 2tp + fp + fn per class
    nz = denom > 0
    f1[nz] = 2.0 * diag[nz] / denom[nz]
    macro_f1 = float(f1.mean())

    # single-label multiclass: sum of per-class tp/fp/fn collapses micro-F1
    # to accuracy, but compute it from the counts anyway
    tp = diag.sum()
    fp = (pred_per_class - diag).sum()
    fn = (true_per_class - diag).sum()
    micro_denom = 2.0 * tp + fp + fn
    micro_f1 = float(2.0 * tp / micro_denom) if micro_denom > 0 else 0.0

    p_o = accuracy
    p_e = float((true_per_class / n) @ (pred_per_class / n))
    kappa = 0.0 if abs(1.0 - p_e) < 1e-15 else float((p_o - p_e) / (1.0 - p_e))

    return MetricsReport(
        accuracy=accuracy,
        macro_f1=macro_f1,
        micro_f1=micro_f1,
        kappa=kappa,
        per_class_f1=tuple(float(v) for v in f1),
    )


def evaluate(preds, labels, n_classes: int) -> MetricsReport:
    """Convenience wrapper: confusion matrix + metric computation in one call."""
    return compute_metrics(confusion_matrix(preds, labels, n_classes))
