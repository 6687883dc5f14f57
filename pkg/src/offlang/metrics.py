"""Confusion matrix and classification report for the NOT/OFF problem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from offlang.corpus import ClassLabel
from offlang.errors import DataError

CLASSES = (ClassLabel.NOT, ClassLabel.OFF)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """``counts[true][predicted]`` with rows and columns ordered NOT, OFF."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (2, 2) or np.any(c < 0):
            raise DataError("confusion matrix must be 2x2 with non-negative counts")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    def to_csv(self) -> str:
        lines = ["true\\pred,NOT,OFF"]
        for label, row in zip(CLASSES, self.counts):
            lines.append(f"{label.value},{row[0]},{row[1]}")
        return "\n".join(lines) + "\n"


def confusion(y_true: Sequence[ClassLabel], y_pred: Sequence[ClassLabel]) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise DataError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted labels")
    if len(y_true) == 0:
        raise DataError("confusion matrix of zero examples")
    counts = np.zeros((2, 2), dtype=np.int64)
    pos = {c: i for i, c in enumerate(CLASSES)}
    for t, p in zip(y_true, y_pred):
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    per_class: dict  # ClassLabel -> ClassScores
    accuracy: float
    macro_avg: tuple[float, float, float]
    weighted_avg: tuple[float, float, float]
    total: int
    zero_division: tuple[str, ...] = field(default=())

    def render(self) -> str:
        """Fixed-width table rounded to two decimals."""
        head = f"{'':>12}  {'precision':>9}  {'recall':>9}  {'f1-score':>9}  {'support':>7}"
        rows = [head, ""]
        for label in CLASSES:
            s = self.per_class[label]
            rows.append(f"{label.value:>12}  {s.precision:9.2f}  {s.recall:9.2f}  {s.f1:9.2f}  {s.support:7d}")
        rows.append("")
        rows.append(f"{'accuracy':>12}  {'':>9}  {'':>9}  {self.accuracy:9.2f}  {self.total:7d}")
        for name, avg in (("macro avg", self.macro_avg), ("weighted avg", self.weighted_avg)):
            rows.append(f"{name:>12}  {avg[0]:9.2f}  {avg[1]:9.2f}  {avg[2]:9.2f}  {self.total:7d}")
        if self.zero_division:
            rows.append("")
            rows.append("zero division set to 0.0 for: " + ", ".join(self.zero_division))
        return "\n".join(rows) + "\n"

    def to_flat(self) -> dict:
        """One ``key -> value`` pair per metric, full precision."""
        out = {}
        for label in CLASSES:
            s = self.per_class[label]
            key = label.value
            out[f"{key}.precision"] = s.precision
            out[f"{key}.recall"] = s.recall
            out[f"{key}.f1"] = s.f1
            out[f"{key}.support"] = s.support
        out["accuracy"] = self.accuracy
        for name, avg in (("macro_avg", self.macro_avg), ("weighted_avg", self.weighted_avg)):
            out[f"{name}.precision"], out[f"{name}.recall"], out[f"{name}.f1"] = avg
        out["total"] = self.total
        out["zero_division"] = ",".join(self.zero_division)
        return out

    def render_flat(self) -> str:
        return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n"
                       for k, v in self.to_flat().items())


def report(cm: ConfusionMatrix) -> ClassificationReport:
    c = cm.counts
    total = cm.total
    if total == 0:
        raise DataError("classification report of an empty confusion matrix")
    per_class = {}
    flagged = []
    for i, label in enumerate(CLASSES):
        tp = c[i, i]
        col, row = c[:, i].sum(), c[i, :].sum()
        if col == 0:
            flagged.append(f"{label.value}.precision")
        if row == 0:
            flagged.append(f"{label.value}.recall")
        precision = tp / col if col else 0.0
        recall = tp / row if row else 0.0
        if precision + recall == 0:
            flagged.append(f"{label.value}.f1")
            f1 = 0.0
        else:
            f1 = 2 * precision * recall / (precision + recall)
        per_class[label] = ClassScores(float(precision), float(recall), float(f1), int(row))
    scores = np.array([[s.precision, s.recall, s.f1] for s in per_class.values()])
    support = np.array([s.support for s in per_class.values()], dtype=np.float64)
    macro = scores.mean(axis=0)
    weighted = (scores * support[:, None]).sum(axis=0) / total
    return ClassificationReport(
        per_class=per_class,
        accuracy=float(np.trace(c) / total),
        macro_avg=tuple(float(v) for v in macro),
        weighted_avg=tuple(float(v) for v in weighted),
        total=total,
        zero_division=tuple(flagged),
    )
