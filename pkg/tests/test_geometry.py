import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoagency.core import (
    BBox,
    GeoPoint,
    Polygon,
    bbox_to_polygon,
    point_in_polygon,
    polygon_area,
    polygon_intersects_bbox,
    polygon_perimeter,
)
from geoagency.errors import InvalidGeometry

from .conftest import square


def test_unit_square_area():
    assert polygon_area(square()) == 1.0


def test_degenerate_ring_rejected():
    with pytest.raises(InvalidGeometry):
        Polygon(exterior=(GeoPoint(0, 0), GeoPoint(1, 1)))


def test_square_with_centered_hole():
    hole = (
        GeoPoint(0.25, 0.25),
        GeoPoint(0.75, 0.25),
        GeoPoint(0.75, 0.75),
        GeoPoint(0.25, 0.75),
    )
    p = Polygon(exterior=square().exterior, holes=(hole,))
    assert polygon_area(p) == pytest.approx(0.75, abs=1e-12)


def test_clockwise_exterior_rejected():
    with pytest.raises(InvalidGeometry):
        Polygon(exterior=(GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0)))


def test_self_intersecting_rejected():
    bowtie = (GeoPoint(0, 0), GeoPoint(1, 1), GeoPoint(1, 0), GeoPoint(0, 1))
    with pytest.raises(InvalidGeometry):
        Polygon(exterior=bowtie)


def test_explicit_closure_rejected():
    ring = (GeoPoint(0, 0), GeoPoint(1, 0), GeoPoint(1, 1), GeoPoint(0, 1), GeoPoint(0, 0))
    with pytest.raises(InvalidGeometry):
        Polygon(exterior=ring)


def test_area_invariant_under_cyclic_rotation():
    ring = (GeoPoint(0, 0), GeoPoint(2, 0), GeoPoint(3, 1), GeoPoint(1, 2), GeoPoint(-1, 1))
    base = polygon_area(Polygon(exterior=ring))
    for k in range(1, len(ring)):
        rotated = ring[k:] + ring[:k]
        assert polygon_area(Polygon(exterior=rotated)) == pytest.approx(base, abs=1e-12)


@given(
    x0=st.floats(-100, 100),
    y0=st.floats(-100, 100),
    w=st.floats(0.1, 50),
    h=st.floats(0.1, 50),
)
def test_rectangle_area_nonnegative_and_exact(x0, y0, w, h):
    p = Polygon(
        exterior=(
            GeoPoint(x0, y0),
            GeoPoint(x0 + w, y0),
            GeoPoint(x0 + w, y0 + h),
            GeoPoint(x0, y0 + h),
        )
    )
    area = polygon_area(p)
    assert area >= 0
    assert area == pytest.approx(w * h, rel=1e-9)


def _brute_polygon_bbox_intersects(p: Polygon, b: BBox, steps=200) -> bool:
    # Dense point sampling over the box, plus the reverse test on polygon
    # vertices: crude but independent of the shapely-backed implementation.
    for i in range(steps + 1):
        for j in range(steps + 1):
            x = b.min_x + (b.max_x - b.min_x) * i / steps
            y = b.min_y + (b.max_y - b.min_y) * j / steps
            if point_in_polygon(p, x, y):
                return True
    return False


def test_bbox_overlap_cases(unit_square):
    assert polygon_intersects_bbox(unit_square, BBox(0.5, 0.5, 2, 2)) is True
    assert polygon_intersects_bbox(unit_square, BBox(5, 5, 6, 6)) is False


def test_bbox_shared_edge_counts(unit_square):
    b = BBox(1, 0, 2, 1)
    assert polygon_intersects_bbox(unit_square, b) is True
    assert _brute_polygon_bbox_intersects(unit_square, b) is True


def test_bbox_corner_touch_counts(unit_square):
    assert polygon_intersects_bbox(unit_square, BBox(1, 1, 2, 2)) is True


def test_perimeter_square():
    assert polygon_perimeter(square(side=3.0)) == pytest.approx(12.0, abs=1e-12)


def test_bbox_to_polygon_roundtrip():
    b = BBox(1, 2, 4, 6)
    p = bbox_to_polygon(b)
    assert p.bbox() == b
    assert polygon_area(p) == pytest.approx(12.0, abs=1e-12)


def test_point_tests_boundary_inclusive(unit_square):
    assert point_in_polygon(unit_square, 0.5, 0.5)
    assert point_in_polygon(unit_square, 0.0, 0.5)
    assert not point_in_polygon(unit_square, 1.5, 0.5)


def test_nonfinite_point_rejected():
    with pytest.raises(InvalidGeometry):
        GeoPoint(math.nan, 0.0)
