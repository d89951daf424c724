"""Perception: route patch queries to task-appropriate perceptors.

Real detectors/segmenters/VQA models are out of scope; the mocks here are
deterministic stand-ins driven by the synthetic world's ground truth plus
hash-seeded noise. Noise depends only on (seed, patch, question), never on
call order, so resumed or replayed runs see identical outputs.

Out-of-process models attach via a JSON-over-stdio contract: one
PerceptionQuery JSON object per request line, one PerceptionResult JSON
object per response line (see README).
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..embeddings import cell_index
from ..errors import CallBudgetExhausted, ParamSchemaError, SchemaError, UnknownTask
from ..navigation import PatchRef


class TaskKind(str, enum.Enum):
    CLASSIFY = "classify"
    DETECT = "detect"
    CAPTION = "caption"
    CHANGE = "change"


@dataclass(frozen=True)
class PerceptionQuery:
    patches: tuple[PatchRef, ...]
    task: TaskKind
    question: str
    classes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.patches:
            raise ParamSchemaError("perception query needs >= 1 patch")
        object.__setattr__(self, "patches", tuple(self.patches))
        object.__setattr__(self, "classes", tuple(self.classes))

    def to_json(self) -> dict:
        # Wire form of the out-of-process plugin protocol (one query per line).
        return {
            "patches": [p.to_json() for p in self.patches],
            "task": self.task.value,
            "question": self.question,
            "classes": list(self.classes),
        }


@dataclass(frozen=True)
class PerceptionResult:
    answerable: bool
    confidence: float
    note: str
    label: str | None = None

    def __post_init__(self):
        if self.answerable and self.label is None:
            raise SchemaError("answerable result must carry a label")
        if not self.answerable and self.label is not None:
            raise SchemaError("unanswerable result must not carry a label")
        if not self.answerable and not self.note:
            raise SchemaError("unanswerable result must explain itself in the note")

    def to_json(self) -> dict:
        return {
            "answerable": self.answerable,
            "label": self.label,
            "confidence": self.confidence,
            "note": self.note,
        }


def _unit_hash(*parts: str) -> float:
    h = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little") / 2.0**64


class Perceptor:
    """Interface: one result per patch."""

    def perceive(self, query: PerceptionQuery) -> list[PerceptionResult]:
        raise NotImplementedError


class MockOraclePerceptor(Perceptor):
    """Ground-truth-backed mock with label-flip noise rate epsilon."""

    def __init__(
        self,
        labels: np.ndarray,
        class_names: list[str],
        noise: float = 0.0,
        seed: int = 0,
    ):
        if not (0.0 <= noise < 1.0):
            raise ParamSchemaError(f"noise must be in [0, 1), got {noise}")
        self.labels = np.asarray(labels).reshape(-1)
        self.class_names = list(class_names)
        self.noise = noise
        self.seed = seed

    def _patch_true_label(self, patch: PatchRef) -> str:
        idxs = [cell_index(c) for c in patch.cell_ids]
        values, counts = np.unique(self.labels[idxs], return_counts=True)
        best = values[np.argmax(counts)]
        return self.class_names[int(best)]

    def _perceive_patch(self, patch: PatchRef, question: str) -> PerceptionResult:
        true_label = self._patch_true_label(patch)
        key = f"{self.seed}|{question}|{','.join(patch.cell_ids)}"
        label = true_label
        if self.noise > 0 and _unit_hash(key, "flip") < self.noise:
            others = [c for c in self.class_names if c != true_label]
            label = others[int(_unit_hash(key, "pick") * len(others))]
        jitter = (_unit_hash(key, "conf") * 2.0 - 1.0) * 0.05 if self.noise > 0 else 0.0
        confidence = min(1.0, max(0.0, 1.0 - self.noise + jitter))
        return PerceptionResult(
            answerable=True,
            label=label,
            confidence=confidence,
            note=f"observed {label} over {len(patch.cell_ids)} cell(s)",
        )

    def perceive(self, query: PerceptionQuery) -> list[PerceptionResult]:
        return [self._perceive_patch(p, query.question) for p in query.patches]


class CaptionPerceptor(MockOraclePerceptor):
    """Caption mock: names the dominant class and coverage share of a patch."""

    def perceive(self, query: PerceptionQuery) -> list[PerceptionResult]:
        out = []
        for patch in query.patches:
            idxs = [cell_index(c) for c in patch.cell_ids]
            values, counts = np.unique(self.labels[idxs], return_counts=True)
            best = int(np.argmax(counts))
            name = self.class_names[int(values[best])]
            share = counts[best] / counts.sum()
            out.append(
                PerceptionResult(
                    answerable=True,
                    label=name,
                    confidence=float(share),
                    note=f"patch is {share:.0%} {name}",
                )
            )
        return out


class ResolutionLimitedPerceptor(Perceptor):
    """Refuses patches below a zoom threshold instead of failing silently."""

    def __init__(self, inner: Perceptor, min_zoom: int):
        self.inner = inner
        self.min_zoom = min_zoom

    def perceive(self, query: PerceptionQuery) -> list[PerceptionResult]:
        out = []
        for patch in query.patches:
            if patch.zoom < self.min_zoom:
                out.append(
                    PerceptionResult(
                        answerable=False,
                        confidence=0.0,
                        note=f"resolution too low at zoom {patch.zoom}",
                    )
                )
            else:
                out.extend(
                    self.inner.perceive(
                        PerceptionQuery(
                            patches=(patch,),
                            task=query.task,
                            question=query.question,
                            classes=query.classes,
                        )
                    )
                )
        return out


@dataclass
class PerceptorRegistry:
    perceptors: dict[TaskKind, Perceptor] = field(default_factory=dict)
    calls_made: int = 0
    max_calls: int | None = None

    def register(self, task: TaskKind, perceptor: Perceptor) -> None:
        self.perceptors[task] = perceptor

    def remaining_calls(self) -> int | None:
        if self.max_calls is None:
            return None
        return max(0, self.max_calls - self.calls_made)

    def perceive(self, query: PerceptionQuery) -> list[PerceptionResult]:
        perceptor = self.perceptors.get(query.task)
        if perceptor is None:
            raise UnknownTask(f"no perceptor for task {query.task.value!r}")
        if self.max_calls is not None and self.calls_made >= self.max_calls:
            raise CallBudgetExhausted(
                f"perceptor call budget of {self.max_calls} exhausted"
            )
        # One registry call bills one budget unit regardless of patch count.
        self.calls_made += 1
        return perceptor.perceive(query)
