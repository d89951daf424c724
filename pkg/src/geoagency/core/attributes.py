"""Attribute values attachable to features: a small tagged union.

Encodes to/from JSON so attributes survive GeoJSON round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SchemaError
from .geometry import TimeStamp


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Number:
    value: float
    unit: str = ""


@dataclass(frozen=True)
class Category:
    tags: tuple[str, ...]


@dataclass(frozen=True)
class Series:
    points: tuple[tuple[TimeStamp, float], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((int(t), float(v)) for t, v in self.points))
        times = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise SchemaError("series timestamps must be strictly increasing")


@dataclass(frozen=True)
class ImageRef:
    artifact_id: str


AttributeValue = Text | Number | Category | Series | ImageRef


def encode_attribute(value: AttributeValue) -> dict:
    if isinstance(value, Text):
        return {"type": "text", "value": value.value}
    if isinstance(value, Number):
        return {"type": "number", "value": value.value, "unit": value.unit}
    if isinstance(value, Category):
        return {"type": "category", "tags": list(value.tags)}
    if isinstance(value, Series):
        return {
            "type": "series",
            "name": value.name,
            "points": [[t, v] for t, v in value.points],
        }
    if isinstance(value, ImageRef):
        return {"type": "image_ref", "artifact_id": value.artifact_id}
    raise SchemaError(f"not an AttributeValue: {value!r}")


def decode_attribute(obj: dict) -> AttributeValue:
    kind = obj.get("type")
    if kind == "text":
        return Text(obj["value"])
    if kind == "number":
        return Number(obj["value"], obj.get("unit", ""))
    if kind == "category":
        return Category(tuple(obj["tags"]))
    if kind == "series":
        return Series(tuple((t, v) for t, v in obj["points"]), obj.get("name", ""))
    if kind == "image_ref":
        return ImageRef(obj["artifact_id"])
    raise SchemaError(f"unknown attribute type {kind!r}")
