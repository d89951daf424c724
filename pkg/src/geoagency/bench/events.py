"""The append-only edit ledger.

Event kinds follow the suggest-review-commit workflow. `commit` and
`attribute` events are part of the replayable record but do not count as
edits in the rework-rate denominator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..core.geometry import TimeStamp
from ..core.vector import LabelOrigin, LabelStatus
from ..errors import SchemaError


class EventKind(str, enum.Enum):
    CREATE = "create"
    OVERWRITE = "overwrite"
    DELETE = "delete"
    ACCEPT = "accept"
    REJECT = "reject"
    ATTRIBUTE = "attribute"
    COMMIT = "commit"


# Kinds counted as edits by the rework-rate denominator.
EDIT_KINDS = frozenset(
    {EventKind.CREATE, EventKind.OVERWRITE, EventKind.DELETE, EventKind.ACCEPT, EventKind.REJECT}
)


@dataclass(frozen=True)
class EditEvent:
    t: TimeStamp
    kind: EventKind
    target: str
    origin: LabelOrigin = LabelOrigin.MANUAL
    label: str | None = None
    prior_label: str | None = None
    prior_status: LabelStatus | None = None

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "kind": self.kind.value,
            "target": self.target,
            "origin": self.origin.value,
            "label": self.label,
            "prior_label": self.prior_label,
            "prior_status": self.prior_status.value if self.prior_status else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EditEvent":
        return cls(
            t=obj["t"],
            kind=EventKind(obj["kind"]),
            target=obj["target"],
            origin=LabelOrigin(obj["origin"]),
            label=obj.get("label"),
            prior_label=obj.get("prior_label"),
            prior_status=LabelStatus(obj["prior_status"]) if obj.get("prior_status") else None,
        )


class Ledger:
    def __init__(self):
        self.events: list[EditEvent] = []

    def append(self, event: EditEvent) -> None:
        if self.events and event.t < self.events[-1].t:
            raise SchemaError(
                f"ledger timestamps must be non-decreasing ({event.t} < {self.events[-1].t})"
            )
        self.events.append(event)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)
