"""Artifacts and provenance records."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field

from ..errors import SchemaError
from .geometry import TimeStamp

MANUAL_PRODUCER = "manual"
IMPORT_PRODUCER = "import"


class ArtifactKind(str, enum.Enum):
    RASTER = "raster"
    VECTOR = "vector"
    PLOT = "plot"
    REPORT = "report"


def parameter_digest(params: dict) -> str:
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ProvenanceRecord:
    producer: str  # graph hash, "manual", or "import"
    input_artifact_ids: tuple[str, ...] = ()
    created_at: TimeStamp = 0
    param_digest: str = ""

    def __post_init__(self):
        if not self.producer:
            raise SchemaError("provenance producer must be non-empty")
        object.__setattr__(self, "input_artifact_ids", tuple(self.input_artifact_ids))


@dataclass
class Artifact:
    id: str
    kind: ArtifactKind
    payload_ref: str  # layer name for raster/vector kinds, slug otherwise
    provenance: ProvenanceRecord
    payload: dict | None = None  # inline JSON for plot/report kinds

    def __post_init__(self):
        if self.provenance.producer != IMPORT_PRODUCER and not self.provenance.producer:
            raise SchemaError(f"artifact {self.id!r} lacks provenance")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "payload_ref": self.payload_ref,
            "payload": self.payload,
            "provenance": {
                "producer": self.provenance.producer,
                "input_artifact_ids": list(self.provenance.input_artifact_ids),
                "created_at": self.provenance.created_at,
                "param_digest": self.provenance.param_digest,
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Artifact":
        prov = obj["provenance"]
        return cls(
            id=obj["id"],
            kind=ArtifactKind(obj["kind"]),
            payload_ref=obj["payload_ref"],
            payload=obj.get("payload"),
            provenance=ProvenanceRecord(
                producer=prov["producer"],
                input_artifact_ids=tuple(prov["input_artifact_ids"]),
                created_at=prov["created_at"],
                param_digest=prov.get("param_digest", ""),
            ),
        )
