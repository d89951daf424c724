"""Geo-referenced memory: WRITE / RETRIEVE / CURATE over indexed entries.

Writes are append-only; corrections go through CURATE so the session ledger
has a single mutation path. Indexes (R-tree + sorted timestamps) are
rebuilt on load, never persisted.
"""

from __future__ import annotations

import bisect
import enum
import json
from dataclasses import dataclass, replace

from ..core.geometry import BBox, Polygon, TimeStamp, TimeWindow, polygon_intersects_bbox, polygons_intersect
from ..core.vector import polygon_from_geojson, polygon_to_geojson
from ..errors import AlreadyDeleted, EmptyQuery, NotFound, OutOfRoi
from .rtree import RTree


class EntryStatus(str, enum.Enum):
    SUGGESTED = "suggested"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


class Author(str, enum.Enum):
    AGENT = "agent"
    USER = "user"


@dataclass(frozen=True)
class MemoryEntry:
    id: str
    geometry: Polygon
    timestamp: TimeStamp
    query: str
    notes: str
    status: EntryStatus
    author: Author
    output_ref: str | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "geometry": polygon_to_geojson(self.geometry),
            "timestamp": self.timestamp,
            "query": self.query,
            "notes": self.notes,
            "status": self.status.value,
            "author": self.author.value,
            "output_ref": self.output_ref,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MemoryEntry":
        return cls(
            id=obj["id"],
            geometry=polygon_from_geojson(obj["geometry"]),
            timestamp=obj["timestamp"],
            query=obj["query"],
            notes=obj["notes"],
            status=EntryStatus(obj["status"]),
            author=Author(obj["author"]),
            output_ref=obj.get("output_ref"),
        )


class CurateAction(str, enum.Enum):
    DELETE = "delete"
    CORRECT = "correct"
    CONFIRM = "confirm"


class GeoMemory:
    def __init__(self, roi: Polygon):
        self.roi = roi
        self._entries: dict[str, MemoryEntry] = {}
        self._order: list[str] = []  # append order, for serialization
        self._rtree = RTree()
        self._temporal: list[tuple[TimeStamp, str]] = []  # sorted
        self._next_id = 1

    def __len__(self) -> int:
        return sum(1 for e in self._entries.values() if e.status != EntryStatus.DELETED)

    # -- WRITE ----------------------------------------------------------------

    def write(
        self,
        geometry: Polygon,
        timestamp: TimeStamp,
        query: str,
        notes: str = "",
        author: Author = Author.AGENT,
        output_ref: str | None = None,
    ) -> str:
        if not polygon_intersects_bbox(geometry, self.roi.bbox()) or not polygons_intersect(
            geometry, self.roi
        ):
            raise OutOfRoi("memory entry geometry does not intersect the workspace ROI")
        entry_id = f"m{self._next_id:06d}"
        self._next_id += 1
        status = EntryStatus.SUGGESTED if author == Author.AGENT else EntryStatus.CONFIRMED
        entry = MemoryEntry(
            id=entry_id,
            geometry=geometry,
            timestamp=timestamp,
            query=query,
            notes=notes,
            status=status,
            author=author,
            output_ref=output_ref,
        )
        self._entries[entry_id] = entry
        self._order.append(entry_id)
        self._index(entry)
        return entry_id

    def _index(self, entry: MemoryEntry) -> None:
        self._rtree.insert(entry.id, entry.geometry.bbox())
        bisect.insort(self._temporal, (entry.timestamp, entry.id))

    def _unindex(self, entry: MemoryEntry) -> None:
        self._rtree.delete(entry.id, entry.geometry.bbox())
        pos = bisect.bisect_left(self._temporal, (entry.timestamp, entry.id))
        if pos < len(self._temporal) and self._temporal[pos] == (entry.timestamp, entry.id):
            self._temporal.pop(pos)

    # -- RETRIEVE ---------------------------------------------------------------

    def retrieve(
        self,
        spatial: BBox | Polygon | None = None,
        temporal: TimeWindow | None = None,
        keyword: str | None = None,
        limit: int = 100,
    ) -> list[MemoryEntry]:
        if spatial is None and temporal is None and keyword is None:
            raise EmptyQuery("retrieve needs at least one of spatial/temporal/keyword")

        candidates: set[str] | None = None
        if spatial is not None:
            box = spatial if isinstance(spatial, BBox) else spatial.bbox()
            hits = set(self._rtree.query(box))
            if isinstance(spatial, Polygon):
                hits = {
                    i
                    for i in hits
                    if polygons_intersect(self._entries[i].geometry, spatial)
                }
            else:
                hits = {
                    i
                    for i in hits
                    if polygon_intersects_bbox(self._entries[i].geometry, box)
                }
            candidates = hits
        if temporal is not None:
            lo = bisect.bisect_left(self._temporal, (temporal.start, ""))
            hi = bisect.bisect_right(self._temporal, (temporal.end, "￿"))
            in_window = {i for _, i in self._temporal[lo:hi]}
            candidates = in_window if candidates is None else candidates & in_window
        if candidates is None:
            candidates = set(self._entries)

        out = []
        needle = keyword.lower() if keyword is not None else None
        for entry_id in candidates:
            entry = self._entries[entry_id]
            if entry.status == EntryStatus.DELETED:
                continue
            if needle is not None and needle not in (entry.query + " " + entry.notes).lower():
                continue
            out.append(entry)
        out.sort(key=lambda e: (-e.timestamp, e.id))
        return out[:limit]

    # -- CURATE -----------------------------------------------------------------

    def curate(
        self,
        entry_id: str,
        action: CurateAction,
        notes: str | None = None,
        geometry: Polygon | None = None,
    ) -> MemoryEntry:
        entry = self._entries.get(entry_id)
        if entry is None:
            raise NotFound(f"no memory entry {entry_id!r}")
        if entry.status == EntryStatus.DELETED:
            raise AlreadyDeleted(f"memory entry {entry_id!r} is deleted")

        if action == CurateAction.DELETE:
            self._unindex(entry)
            updated = replace(entry, status=EntryStatus.DELETED)
        elif action == CurateAction.CORRECT:
            if geometry is not None and (
                not polygons_intersect(geometry, self.roi)
            ):
                raise OutOfRoi("corrected geometry does not intersect the workspace ROI")
            self._unindex(entry)
            updated = replace(
                entry,
                notes=notes if notes is not None else entry.notes,
                geometry=geometry if geometry is not None else entry.geometry,
                status=EntryStatus.CONFIRMED,
            )
            self._index(updated)
        elif action == CurateAction.CONFIRM:
            updated = replace(entry, status=EntryStatus.CONFIRMED)
        else:
            raise NotFound(f"unknown curate action {action!r}")

        self._entries[entry_id] = updated
        return updated

    def get(self, entry_id: str) -> MemoryEntry:
        entry = self._entries.get(entry_id)
        if entry is None:
            raise NotFound(f"no memory entry {entry_id!r}")
        return entry

    def all_entries(self) -> list[MemoryEntry]:
        return [self._entries[i] for i in self._order]

    # -- persistence -------------------------------------------------------------

    def save_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for entry_id in self._order:
                f.write(json.dumps(self._entries[entry_id].to_json()))
                f.write("\n")

    @classmethod
    def load_jsonl(cls, path, roi: Polygon) -> "GeoMemory":
        store = cls(roi)
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                entry = MemoryEntry.from_json(json.loads(line))
                store._entries[entry.id] = entry
                store._order.append(entry.id)
                if entry.status != EntryStatus.DELETED:
                    store._index(entry)
                numeric = int(entry.id[1:])
                store._next_id = max(store._next_id, numeric + 1)
        return store
