"""Accuracy, macro precision/recall and F-beta over a confusion matrix.

F is the harmonic combination of the *macro* precision and recall, not the
mean of per-class F1 values. Any zero denominator contributes 0.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from foodrec.errors import (
    EmptyEvaluationSet,
    InvalidBeta,
    LengthMismatch,
    UnknownLabel,
)


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple
    counts: np.ndarray  # rows = true class, columns = predicted class

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def tp(self) -> np.ndarray:
        return np.diag(self.counts)

    @property
    def fp(self) -> np.ndarray:
        return self.counts.sum(axis=0) - self.tp

    @property
    def fn(self) -> np.ndarray:
        return self.counts.sum(axis=1) - self.tp


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    f_score: float
    beta: float = 1.0

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def confusion(y_true, y_pred, labels) -> ConfusionMatrix:
    y_true, y_pred, labels = list(y_true), list(y_pred), tuple(labels)
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    index = {label: i for i, label in enumerate(labels)}
    try:
        rows = np.fromiter((index[t] for t in y_true), dtype=np.intp, count=len(y_true))
        cols = np.fromiter((index[p] for p in y_pred), dtype=np.intp, count=len(y_pred))
    except KeyError as exc:
        raise UnknownLabel(f"label {exc.args[0]!r} not in class set {labels}") from None
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    return ConfusionMatrix(labels=labels, counts=counts)


def _require_samples(cm):
    if cm.total == 0:
        raise EmptyEvaluationSet("metrics need at least one evaluated sample")


def _guarded_ratio(num, den):
    num = num.astype(float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def accuracy(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    return float(np.trace(cm.counts)) / cm.total


def macro_precision(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    return float(_guarded_ratio(cm.tp, cm.tp + cm.fp).mean())


def macro_recall(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    return float(_guarded_ratio(cm.tp, cm.tp + cm.fn).mean())


def f_score(precision: float, recall: float, beta: float = 1.0) -> float:
    if beta <= 0:
        raise InvalidBeta(f"beta must be positive, got {beta}")
    b2 = beta * beta
    den = b2 * precision + recall
    if den == 0:
        return 0.0
    return (b2 + 1) * precision * recall / den


def evaluate(y_true, y_pred, labels, beta: float = 1.0) -> MetricReport:
    cm = confusion(y_true, y_pred, labels)
    p, r = macro_precision(cm), macro_recall(cm)
    return MetricReport(
        accuracy=accuracy(cm),
        macro_precision=p,
        macro_recall=r,
        f_score=f_score(p, r, beta),
        beta=float(beta),
    )
