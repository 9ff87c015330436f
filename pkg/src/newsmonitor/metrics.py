"""Multi-class evaluation: confusion matrix, precision/recall/F1, accuracy.

Headline numbers are macro averages (all classes weighted equally); micro
variants are included in the report for completeness.  Per-class divisions
by zero yield 0.0 and the class is listed under `zero_division_classes`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple
    counts: np.ndarray  # (C, C) int64, rows = gold, columns = predicted

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        C = len(self.classes)
        if counts.shape != (C, C):
            raise MetricsError(f"confusion matrix shape {counts.shape} != ({C}, {C})")
        if (counts < 0).any():
            raise MetricsError("negative confusion counts")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_rows(self):
        """CSV rows: header then one row per gold class."""
        header = ["gold\\predicted"] + list(self.classes)
        rows = [header]
        for i, name in enumerate(self.classes):
            rows.append([name] + [int(v) for v in self.counts[i]])
        return rows


@dataclass(frozen=True)
class EvalReport:
    classes: tuple
    confusion: ConfusionMatrix
    per_class: dict            # class -> {precision, recall, f1, support}
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_precision: float
    micro_recall: float
    micro_f1: float
    zero_division_classes: tuple = field(default=())

    @property
    def precision(self) -> float:
        """Macro precision (the averaging used for headline numbers)."""
        return self.macro_precision

    @property
    def recall(self) -> float:
        return self.macro_recall

    @property
    def f1(self) -> float:
        return self.macro_f1

    def to_json(self) -> str:
        payload = {
            "classes": list(self.classes),
            "accuracy": self.accuracy,
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall,
                      "f1": self.macro_f1},
            "micro": {"precision": self.micro_precision, "recall": self.micro_recall,
                      "f1": self.micro_f1},
            "per_class": {c: self.per_class[c] for c in self.classes},
            "zero_division_classes": list(self.zero_division_classes),
            "confusion": [[int(v) for v in row] for row in self.confusion.counts],
        }
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def confusion_matrix(gold, predicted, classes) -> ConfusionMatrix:
    classes = tuple(classes)
    if len(gold) != len(predicted):
        raise MetricsError("gold and predicted lengths differ")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, predicted):
        if g not in index:
            raise MetricsError(f"unseen gold label {g!r}")
        if p not in index:
            raise MetricsError(f"unseen predicted label {p!r}")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(classes, counts)


def evaluate(gold, predicted, classes) -> EvalReport:
    """Per-class P/R/F1 plus macro and micro averages and accuracy.

    P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); accuracy is the trace
    over the total.  Empty denominators produce 0.0 with the class flagged.
    """
    cm = confusion_matrix(gold, predicted, classes)
    counts = cm.counts
    tp = np.diag(counts).astype(np.float64)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    per_class = {}
    flagged = []
    precs, recs, f1s = [], [], []
    for i, name in enumerate(cm.classes):
        zero = False
        if tp[i] + fp[i] > 0:
            p = tp[i] / (tp[i] + fp[i])
        else:
            p, zero = 0.0, True
        if tp[i] + fn[i] > 0:
            r = tp[i] / (tp[i] + fn[i])
        else:
            r, zero = 0.0, True
        if p + r > 0:
            f1 = 2 * p * r / (p + r)
        else:
            f1, zero = 0.0, True
        if zero:
            flagged.append(name)
        per_class[name] = {"precision": float(p), "recall": float(r),
                           "f1": float(f1), "support": int(tp[i] + fn[i])}
        precs.append(p)
        recs.append(r)
        f1s.append(f1)
    total = cm.total
    if total == 0:
        raise MetricsError("no labels to evaluate")
    accuracy = float(tp.sum() / total)
    micro_tp, micro_fp, micro_fn = tp.sum(), fp.sum(), fn.sum()
    micro_p = float(micro_tp / (micro_tp + micro_fp)) if micro_tp + micro_fp else 0.0
    micro_r = float(micro_tp / (micro_tp + micro_fn)) if micro_tp + micro_fn else 0.0
    micro_f1 = (2 * micro_p * micro_r / (micro_p + micro_r)) if micro_p + micro_r else 0.0
    return EvalReport(classes=cm.classes, confusion=cm, per_class=per_class,
                      accuracy=accuracy,
                      macro_precision=float(np.mean(precs)),
                      macro_recall=float(np.mean(recs)),
                      macro_f1=float(np.mean(f1s)),
                      micro_precision=micro_p, micro_recall=micro_r,
                      micro_f1=float(micro_f1),
                      zero_division_classes=tuple(flagged))
