"""Planar geometry primitives.

All coordinates are meters in one synthetic planar CRS ("LOCAL/METERS").
Polygons are stored as open rings (first vertex != last, closure implicit)
with a counterclockwise exterior. Validity is checked on construction via
``Polygon.validate``; operations assume valid input.

Predicates that are easy to get subtly wrong (simplicity, point-in-polygon,
polygon/box intersection) delegate to shapely; storage and the area formula
stay ours so tests can pin them against hand computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import shapely.geometry as _sg
from shapely.prepared import prep as _prep

from ..errors import InvalidGeometry

TimeStamp = int  # integer seconds since epoch


@dataclass(frozen=True)
class TimeWindow:
    start: TimeStamp
    end: TimeStamp

    def __post_init__(self):
        if self.start > self.end:
            raise InvalidGeometry(f"time window start {self.start} > end {self.end}")

    def contains(self, t: TimeStamp) -> bool:
        return self.start <= t <= self.end


@dataclass(frozen=True)
class GeoPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidGeometry(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass(frozen=True)
class BBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise InvalidGeometry(f"inverted bbox {self}")

    def intersects(self, other: "BBox") -> bool:
        # Edge/corner touching counts as intersecting.
        return not (
            self.max_x < other.min_x
            or other.max_x < self.min_x
            or self.max_y < other.min_y
            or other.max_y < self.min_y
        )

    def contains_point(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.min_x, self.min_y, self.max_x, self.max_y)


Ring = tuple[GeoPoint, ...]


def _ring_signed_area(ring: Ring) -> float:
    # Shoelace over the implicitly closed ring; positive = counterclockwise.
    total = 0.0
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return total / 2.0


def _ring_perimeter(ring: Ring) -> float:
    total = 0.0
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        total += math.hypot(b.x - a.x, b.y - a.y)
    return total


def _validate_ring(ring: Ring, what: str) -> None:
    if len(ring) < 3:
        raise InvalidGeometry(f"{what} has {len(ring)} vertices, need >= 3")
    if len(set((p.x, p.y) for p in ring)) != len(ring):
        raise InvalidGeometry(f"{what} has duplicate vertices")
    if ring[0] == ring[-1]:
        raise InvalidGeometry(f"{what} stores closure explicitly (first == last)")


@dataclass(frozen=True)
class Polygon:
    """Simple polygon: CCW exterior ring plus optional hole rings."""

    exterior: Ring
    holes: tuple[Ring, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "exterior", tuple(self.exterior))
        object.__setattr__(self, "holes", tuple(tuple(r) for r in self.holes))
        self.validate()

    def validate(self) -> None:
        _validate_ring(self.exterior, "exterior ring")
        for i, hole in enumerate(self.holes):
            _validate_ring(hole, f"hole ring {i}")
        if _ring_signed_area(self.exterior) <= 0:
            raise InvalidGeometry("exterior ring must be counterclockwise (signed area > 0)")
        shp = self._shape()
        if not shp.is_valid:
            raise InvalidGeometry("polygon is not simple (self-intersection or bad holes)")

    def _shape(self) -> _sg.Polygon:
        return _sg.Polygon(
            [(p.x, p.y) for p in self.exterior],
            [[(p.x, p.y) for p in hole] for hole in self.holes],
        )

    def bbox(self) -> BBox:
        xs = [p.x for p in self.exterior]
        ys = [p.y for p in self.exterior]
        return BBox(min(xs), min(ys), max(xs), max(ys))

    def centroid(self) -> GeoPoint:
        c = self._shape().centroid
        return GeoPoint(c.x, c.y)


def polygon_area(p: Polygon) -> float:
    """Shoelace area of the exterior minus hole areas, in square meters."""
    area = _ring_signed_area(p.exterior)
    for hole in p.holes:
        area -= abs(_ring_signed_area(hole))
    if area < 0:
        raise InvalidGeometry("holes exceed exterior area")
    return area


def polygon_perimeter(p: Polygon) -> float:
    """Exterior perimeter plus hole perimeters."""
    total = _ring_perimeter(p.exterior)
    for hole in p.holes:
        total += _ring_perimeter(hole)
    return total


def polygon_intersects_bbox(p: Polygon, b: BBox) -> bool:
    """True iff the polygon's area intersects the box; edge touching counts."""
    if not p.bbox().intersects(b):
        return False
    box = _sg.box(b.min_x, b.min_y, b.max_x, b.max_y)
    return p._shape().intersects(box)


def polygons_intersect(a: Polygon, b: Polygon) -> bool:
    if not a.bbox().intersects(b.bbox()):
        return False
    return a._shape().intersects(b._shape())


def point_in_polygon(p: Polygon, x: float, y: float) -> bool:
    """Boundary-inclusive point test."""
    return p._shape().covers(_sg.Point(x, y))


class PreparedPolygon:
    """Cached shapely form for repeated point tests (zonal stats)."""

    def __init__(self, p: Polygon):
        self._prepared = _prep(p._shape())

    def covers_point(self, x: float, y: float) -> bool:
        return self._prepared.covers(_sg.Point(x, y))


def bbox_to_polygon(b: BBox) -> Polygon:
    if b.width == 0 or b.height == 0:
        raise InvalidGeometry("degenerate bbox cannot become a polygon")
    return Polygon(
        exterior=(
            GeoPoint(b.min_x, b.min_y),
            GeoPoint(b.max_x, b.min_y),
            GeoPoint(b.max_x, b.max_y),
            GeoPoint(b.min_x, b.max_y),
        )
    )


def point_to_square(pt: GeoPoint, side: float) -> Polygon:
    """Buffer a point observation into a small square (side = one cell)."""
    h = side / 2.0
    return bbox_to_polygon(BBox(pt.x - h, pt.y - h, pt.x + h, pt.y + h))
