"""Withheld reference labels and the background quality evaluator.

Reference data lives behind SealedReference: every read names its accessor
and anything outside the allow-list raises. User-facing code never holds
the object; tests audit the access log after full sessions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..embeddings import cell_index
from ..errors import EmptySamples, ShapeMismatch
from ..core.geometry import TimeStamp

# Who may read reference labels: the background evaluator, mock perceptors
# (standing in for models that look at imagery), the simulated user's noisy
# belief (standing in for human eyes), and the generator itself.
ALLOWED_ACCESSORS = frozenset({"evaluator", "perceptor", "simuser", "worldgen", "scenario-validation"})


class ReferenceAccessDenied(PermissionError):
    pass


class SealedReference:
    def __init__(
        self,
        labels: np.ndarray,
        class_names: list[str],
        labels_t2: np.ndarray | None = None,
        destroyed_building_ids: tuple[str, ...] = (),
    ):
        self._labels = np.asarray(labels).reshape(-1)
        self._labels_t2 = None if labels_t2 is None else np.asarray(labels_t2).reshape(-1)
        self._class_names = list(class_names)
        self._destroyed = tuple(destroyed_building_ids)
        self.access_log: list[str] = []

    def _check(self, accessor: str) -> None:
        self.access_log.append(accessor)
        if accessor not in ALLOWED_ACCESSORS:
            raise ReferenceAccessDenied(
                f"accessor {accessor!r} may not read withheld reference labels"
            )

    @property
    def class_names(self) -> list[str]:
        return list(self._class_names)

    @property
    def n_cells(self) -> int:
        return self._labels.size

    def read_labels(self, accessor: str) -> np.ndarray:
        self._check(accessor)
        return self._labels.copy()

    def read_labels_t2(self, accessor: str) -> np.ndarray | None:
        self._check(accessor)
        return None if self._labels_t2 is None else self._labels_t2.copy()

    def read_destroyed_buildings(self, accessor: str) -> tuple[str, ...]:
        self._check(accessor)
        return self._destroyed

    def cell_class_name(self, accessor: str, index: int) -> str:
        self._check(accessor)
        return self._class_names[int(self._labels[index])]

    def cell_changed(self, accessor: str, index: int) -> bool:
        self._check(accessor)
        if self._labels_t2 is None:
            return False
        return bool(self._labels[index] != self._labels_t2[index])


def f1_score(predicted: np.ndarray, reference: np.ndarray) -> float:
    """F1 of the positive class; both-empty counts as perfect."""
    predicted = np.asarray(predicted, dtype=bool).reshape(-1)
    reference = np.asarray(reference, dtype=bool).reshape(-1)
    if predicted.shape != reference.shape:
        raise ShapeMismatch(f"prediction {predicted.shape} vs reference {reference.shape}")
    tp = int(np.sum(predicted & reference))
    fp = int(np.sum(predicted & ~reference))
    fn = int(np.sum(~predicted & reference))
    if tp + fp + fn == 0:
        return 1.0
    return 2.0 * tp / (2.0 * tp + fp + fn)


def iou_score(predicted: np.ndarray, reference: np.ndarray) -> float:
    """Intersection over union of positive masks; empty/empty is 1.0."""
    predicted = np.asarray(predicted, dtype=bool).reshape(-1)
    reference = np.asarray(reference, dtype=bool).reshape(-1)
    if predicted.shape != reference.shape:
        raise ShapeMismatch(f"prediction {predicted.shape} vs reference {reference.shape}")
    union = int(np.sum(predicted | reference))
    if union == 0:
        return 1.0
    return int(np.sum(predicted & reference)) / union


class TaskKind(str, enum.Enum):
    BINARY_CLASSIFY = "binary_classify"
    SEGMENT = "segment"


@dataclass(frozen=True)
class QualitySample:
    t: TimeStamp
    q: float
    metric: str

    def to_json(self) -> dict:
        return {"t": self.t, "q": self.q, "metric": self.metric}

    @classmethod
    def from_json(cls, obj: dict) -> "QualitySample":
        return cls(t=obj["t"], q=obj["q"], metric=obj["metric"])


CHANGED_CLASS = "changed"


class Evaluator:
    """Computes Q(t) for committed labels against the sealed reference.

    The target "changed" scores against the t1-vs-t2 change mask (damage
    mapping); any class name scores against that class's cells.
    """

    def __init__(self, reference: SealedReference, task: TaskKind, target_class: str):
        self.reference = reference
        self.task = task
        self.target_class = target_class
        names = reference.class_names
        labels_t2 = reference.read_labels_t2("evaluator")
        if target_class == CHANGED_CLASS and labels_t2 is not None:
            self._ref_positive = reference.read_labels("evaluator") != labels_t2
        elif target_class in names:
            target_idx = names.index(target_class)
            self._ref_positive = reference.read_labels("evaluator") == target_idx
        else:
            self._ref_positive = np.zeros(reference.n_cells, dtype=bool)

    @property
    def metric_name(self) -> str:
        return "f1" if self.task == TaskKind.BINARY_CLASSIFY else "iou"

    def quality(self, committed: dict[str, str]) -> float:
        predicted = np.zeros(self.reference.n_cells, dtype=bool)
        for item_id, label in committed.items():
            if label == self.target_class:
                idx = cell_index(item_id)
                if not (0 <= idx < predicted.size):
                    raise ShapeMismatch(f"cell index {idx} out of range")
                predicted[idx] = True
        if self.task == TaskKind.BINARY_CLASSIFY:
            return f1_score(predicted, self._ref_positive)
        return iou_score(predicted, self._ref_positive)

    def sample(self, committed: dict[str, str], t: TimeStamp) -> QualitySample:
        return QualitySample(t=t, q=self.quality(committed), metric=self.metric_name)


def samples_valid(samples: list[QualitySample]) -> None:
    if not samples:
        raise EmptySamples("no quality samples")
    times = [s.t for s in samples]
    if any(b < a for a, b in zip(times, times[1:])):
        raise EmptySamples("quality samples must be time-ordered")
