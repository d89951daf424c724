"""External attribute sources, stubbed by fixture files.

A fixture file is JSON mapping geometry digests to encoded attribute
values. Real clients (OSM tags, weather series) would implement the same
lookup(geometry, window) shape against live services; tests and scenarios
stay hermetic on the bundled fixtures.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from ..core.attributes import AttributeValue, decode_attribute
from ..core.geometry import Polygon, TimeWindow
from ..errors import FixtureMiss


def geometry_digest(polygon: Polygon) -> str:
    h = hashlib.sha256()
    for ring in (polygon.exterior, *polygon.holes):
        for p in ring:
            h.update(p.x.hex().encode())
            h.update(p.y.hex().encode())
        h.update(b";")
    return h.hexdigest()[:16]


def default_fixture_dir() -> Path:
    return Path(str(resources.files("geoagency.attribution") / "fixtures" / "ext"))


class ExternalSourceStub:
    """Interface: named source resolving a geometry to one attribute value."""

    name: str = "abstract"

    def lookup(self, geometry: Polygon, window: TimeWindow | None = None) -> AttributeValue:
        raise NotImplementedError


class FixtureSource(ExternalSourceStub):
    def __init__(self, name: str, fixture_dir: Path | None = None):
        self.name = name
        path = (fixture_dir or default_fixture_dir()) / f"{name}.json"
        if path.exists():
            with open(path, encoding="utf-8") as f:
                self._table: dict = json.load(f)
        else:
            self._table = {}

    def lookup(self, geometry: Polygon, window: TimeWindow | None = None) -> AttributeValue:
        key = geometry_digest(geometry)
        if key not in self._table:
            raise FixtureMiss(f"source {self.name!r} has no fixture for geometry {key}")
        return decode_attribute(self._table[key])
