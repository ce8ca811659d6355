"""Confusion matrices and the accuracy indexes derived from them."""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from hybridsn_cli.errors import NumericalError


@dataclass
class ConfusionMatrix:
    """K x K counts, rows = true class, columns = predicted class (both 1-based in the API)."""

    num_classes: int
    counts: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.num_classes, self.num_classes), dtype=np.int64)
        if self.counts.shape != (self.num_classes, self.num_classes):
            raise ValueError(f"expected a {self.num_classes}x{self.num_classes} matrix, got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("confusion matrix counts must be non-negative")

    @classmethod
    def from_labels(cls, num_classes: int, true: Sequence[int], predicted: Sequence[int]) -> "ConfusionMatrix":
        matrix = cls(num_classes)
        matrix.accumulate(true, predicted)
        return matrix

    def _check_range(self, classes: np.ndarray) -> None:
        if classes.size and (classes.min() < 1 or classes.max() > self.num_classes):
            raise ValueError(f"class ids must be in 1..{self.num_classes}")

    def accumulate(self, true, predicted) -> "ConfusionMatrix":
        """Add one sample (scalars) or a stream of samples (arrays)."""
        true = np.atleast_1d(np.asarray(true, dtype=np.int64))
        predicted = np.atleast_1d(np.asarray(predicted, dtype=np.int64))
        if true.shape != predicted.shape:
            raise ValueError(f"{true.size} true labels but {predicted.size} predictions")
        self._check_range(true)
        self._check_range(predicted)
        np.add.at(self.counts, (true - 1, predicted - 1), 1)
        return self

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.num_classes != self.num_classes:
            raise ValueError(f"cannot merge a {other.num_classes}-class matrix into a {self.num_classes}-class one")
        return ConfusionMatrix(self.num_classes, self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self, path: Path, class_names: Optional[Sequence[str]] = None) -> None:
        names = list(class_names) if class_names else [str(c) for c in range(1, self.num_classes + 1)]
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["true \\ predicted", *names])
            for name, row in zip(names, self.counts):
                writer.writerow([name, *(int(v) for v in row)])


def _require_samples(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise NumericalError("confusion matrix is empty")


def overall_accuracy(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    return float(np.trace(cm.counts) / cm.total)


def per_class_accuracy(cm: ConfusionMatrix) -> np.ndarray:
    """Recall of every class; NaN for classes without true samples."""
    rows = cm.counts.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(rows > 0, np.diag(cm.counts) / np.maximum(rows, 1), np.nan)


def average_accuracy(cm: ConfusionMatrix) -> float:
    recalls = per_class_accuracy(cm)
    present = ~np.isnan(recalls)
    if not present.any():
        raise NumericalError("no class has a true sample")
    return float(recalls[present].mean())


def kappa(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    total = float(cm.total)
    observed = np.trace(cm.counts) / total
    expected = float(np.sum(cm.counts.sum(axis=1) * cm.counts.sum(axis=0))) / (total * total)
    if expected == 1.0:
        if observed == 1.0:
            return 1.0
        raise NumericalError("kappa is undefined: chance agreement is 1 but observed agreement is not")
    return float((observed - expected) / (1.0 - expected))


@dataclass(frozen=True)
class MetricsReport:
    oa: float
    aa: float
    kappa: float
    per_class: list[Optional[float]]
    confusion: list[list[int]]
    samples: int

    @property
    def num_classes(self) -> int:
        return len(self.per_class)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "MetricsReport":
        return cls(
            oa=float(data["oa"]),
            aa=float(data["aa"]),
            kappa=float(data["kappa"]),
            per_class=[None if v is None else float(v) for v in data["per_class"]],
            confusion=[[int(v) for v in row] for row in data["confusion"]],
            samples=int(data["samples"]),
        )


def metrics_report(cm: ConfusionMatrix) -> MetricsReport:
    recalls = per_class_accuracy(cm)
    return MetricsReport(
        oa=overall_accuracy(cm),
        aa=average_accuracy(cm),
        kappa=kappa(cm),
        per_class=[None if np.isnan(r) else float(r) for r in recalls],
        confusion=cm.counts.tolist(),
        samples=cm.total,
    )


def merge_all(matrices: Iterable[ConfusionMatrix]) -> ConfusionMatrix:
    matrices = list(matrices)
    result = ConfusionMatrix(matrices[0].num_classes)
    for matrix in matrices:
        result = result.merge(matrix)
    return result
