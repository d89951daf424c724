"""Vector features, label lifecycle, and GeoJSON import/export.

Label lifecycle: Suggested -> Accepted -> Committed, Suggested -> Rejected
(terminal), Committed -> Committed (overwrite). Everything else is illegal
and raises InvalidTransition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import InvalidTransition, SchemaError
from .attributes import AttributeValue, decode_attribute, encode_attribute
from .geometry import GeoPoint, Polygon

CRS_TAG = "LOCAL/METERS"


class LabelStatus(str, enum.Enum):
    SUGGESTED = "suggested"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    COMMITTED = "committed"


class LabelOrigin(str, enum.Enum):
    MANUAL = "manual"
    PERCEPTOR = "perceptor"
    PROPAGATION = "propagation"
    DUAL_MODEL = "dual_model"


LEGAL_TRANSITIONS: frozenset[tuple[LabelStatus, LabelStatus]] = frozenset(
    {
        (LabelStatus.SUGGESTED, LabelStatus.ACCEPTED),
        (LabelStatus.SUGGESTED, LabelStatus.REJECTED),
        (LabelStatus.ACCEPTED, LabelStatus.COMMITTED),
        (LabelStatus.COMMITTED, LabelStatus.COMMITTED),  # overwrite
    }
)


def check_transition(current: LabelStatus, new: LabelStatus) -> None:
    if (current, new) not in LEGAL_TRANSITIONS:
        raise InvalidTransition(f"illegal label transition {current.value} -> {new.value}")


@dataclass
class Feature:
    id: str
    geometry: Polygon
    attributes: dict[str, AttributeValue] = field(default_factory=dict)
    label: str | None = None
    label_origin: LabelOrigin = LabelOrigin.MANUAL
    status: LabelStatus = LabelStatus.SUGGESTED

    def __post_init__(self):
        self._check_committed_label()

    def _check_committed_label(self):
        if self.status == LabelStatus.COMMITTED and not self.label:
            raise SchemaError(f"committed feature {self.id!r} must carry a label")

    def transition(self, new_status: LabelStatus, label: str | None = None) -> None:
        check_transition(self.status, new_status)
        self.status = new_status
        if label is not None:
            self.label = label
        self._check_committed_label()

    def copy(self) -> "Feature":
        return Feature(
            id=self.id,
            geometry=self.geometry,
            attributes=dict(self.attributes),
            label=self.label,
            label_origin=self.label_origin,
            status=self.status,
        )


@dataclass
class VectorLayer:
    name: str
    crs: str = CRS_TAG
    features: list[Feature] = field(default_factory=list)

    def __post_init__(self):
        self._by_id: dict[str, Feature] = {}
        for f in self.features:
            if f.id in self._by_id:
                raise SchemaError(f"duplicate feature id {f.id!r} in layer {self.name!r}")
            self._by_id[f.id] = f

    def add(self, feature: Feature) -> None:
        if feature.id in self._by_id:
            raise SchemaError(f"duplicate feature id {feature.id!r} in layer {self.name!r}")
        self.features.append(feature)
        self._by_id[feature.id] = feature

    def get(self, feature_id: str) -> Feature | None:
        return self._by_id.get(feature_id)

    def remove(self, feature_id: str) -> Feature:
        feature = self._by_id.pop(feature_id, None)
        if feature is None:
            raise SchemaError(f"no feature {feature_id!r} in layer {self.name!r}")
        self.features.remove(feature)
        return feature

    def __len__(self) -> int:
        return len(self.features)

    def copy(self) -> "VectorLayer":
        return VectorLayer(
            name=self.name, crs=self.crs, features=[f.copy() for f in self.features]
        )


# -- GeoJSON ------------------------------------------------------------------


def _ring_to_coords(ring) -> list[list[float]]:
    coords = [[p.x, p.y] for p in ring]
    coords.append(coords[0])  # GeoJSON closes rings explicitly
    return coords


def _coords_to_ring(coords) -> tuple[GeoPoint, ...]:
    if len(coords) < 4 or coords[0] != coords[-1]:
        raise SchemaError("GeoJSON ring must be closed with >= 4 positions")
    return tuple(GeoPoint(float(x), float(y)) for x, y in coords[:-1])


def polygon_to_geojson(p: Polygon) -> dict:
    return {
        "type": "Polygon",
        "coordinates": [_ring_to_coords(p.exterior)] + [_ring_to_coords(h) for h in p.holes],
    }


def polygon_from_geojson(obj: dict) -> Polygon:
    if obj.get("type") != "Polygon":
        raise SchemaError(f"expected Polygon geometry, got {obj.get('type')!r}")
    rings = obj["coordinates"]
    if not rings:
        raise SchemaError("Polygon has no rings")
    return Polygon(
        exterior=_coords_to_ring(rings[0]),
        holes=tuple(_coords_to_ring(r) for r in rings[1:]),
    )


def feature_to_geojson(f: Feature) -> dict:
    return {
        "type": "Feature",
        "id": f.id,
        "geometry": polygon_to_geojson(f.geometry),
        "properties": {
            "agency": {
                "label": f.label,
                "status": f.status.value,
                "origin": f.label_origin.value,
            },
            "attributes": {k: encode_attribute(v) for k, v in f.attributes.items()},
        },
    }


def feature_from_geojson(obj: dict) -> Feature:
    if obj.get("type") != "Feature":
        raise SchemaError(f"expected Feature, got {obj.get('type')!r}")
    props = obj.get("properties") or {}
    agency = props.get("agency") or {}
    attributes = {
        k: decode_attribute(v) for k, v in (props.get("attributes") or {}).items()
    }
    return Feature(
        id=str(obj["id"]),
        geometry=polygon_from_geojson(obj["geometry"]),
        attributes=attributes,
        label=agency.get("label"),
        label_origin=LabelOrigin(agency.get("origin", "manual")),
        status=LabelStatus(agency.get("status", "suggested")),
    )


def layer_to_geojson(layer: VectorLayer) -> dict:
    return {
        "type": "FeatureCollection",
        "name": layer.name,
        "crs": layer.crs,
        "features": [feature_to_geojson(f) for f in layer.features],
    }


def layer_from_geojson(obj: dict) -> VectorLayer:
    if obj.get("type") != "FeatureCollection":
        raise SchemaError(f"expected FeatureCollection, got {obj.get('type')!r}")
    return VectorLayer(
        name=obj.get("name", "layer"),
        crs=obj.get("crs", CRS_TAG),
        features=[feature_from_geojson(f) for f in obj.get("features", [])],
    )
