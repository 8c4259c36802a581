"""Binary classification metrics with +1 as the positive class."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DomainError, ShapeMismatchError


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: tuple  # ((TN, FP), (FN, TP))

    @property
    def total(self) -> int:
        return int(sum(sum(r) for r in self.confusion))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["confusion"] = [list(r) for r in self.confusion]
        return d


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def evaluate(predictions, truth) -> Metrics:
    pred = np.asarray(predictions).ravel()
    true = np.asarray(truth).ravel()
    if pred.size != true.size:
        raise ShapeMismatchError(f"{pred.size} predictions for {true.size} labels")
    if pred.size == 0:
        raise DomainError("cannot evaluate an empty prediction set")
    tp = int(np.sum((pred == 1) & (true == 1)))
    tn = int(np.sum((pred != 1) & (true != 1)))
    fp = int(np.sum((pred == 1) & (true != 1)))
    fn = int(np.sum((pred != 1) & (true == 1)))
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall) if precision + recall else 0.0
    return Metrics((tp + tn) / pred.size, precision, recall, f1, ((tn, fp), (fn, tp)))
