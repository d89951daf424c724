"""Zonal statistics: reduce raster cells under a polygon footprint.

A cell belongs to the zone when its center is covered by the polygon
(boundary inclusive). Nodata cells are excluded from every statistic.
"""

from __future__ import annotations

import numpy as np

from ..errors import NoCellsCovered, UnsortedStack
from .geometry import Polygon, PreparedPolygon, TimeStamp
from .raster import GridRaster


def cells_covered(raster: GridRaster, polygon: Polygon) -> np.ndarray:
    """Indices of cells whose centers fall inside the polygon."""
    box = polygon.bbox()
    centers = raster.cell_centers()
    rough = (
        (centers[:, 0] >= box.min_x)
        & (centers[:, 0] <= box.max_x)
        & (centers[:, 1] >= box.min_y)
        & (centers[:, 1] <= box.max_y)
    )
    candidates = np.nonzero(rough)[0]
    if candidates.size == 0:
        return candidates
    prepared = PreparedPolygon(polygon)
    inside = [i for i in candidates if prepared.covers_point(centers[i, 0], centers[i, 1])]
    return np.asarray(inside, dtype=np.int64)


def zonal_stats(raster: GridRaster, band: str, polygon: Polygon) -> dict[str, float]:
    idx = cells_covered(raster, polygon)
    if idx.size == 0:
        raise NoCellsCovered("polygon covers no cell centers")
    values = raster.band(band)[idx]
    values = values[values != raster.nodata]
    if values.size == 0:
        raise NoCellsCovered("all covered cells are nodata")
    return {
        "mean": float(values.mean()),
        "min": float(values.min()),
        "max": float(values.max()),
        "count": float(values.size),
    }


def extract_time_series(
    stack: list[GridRaster], band: str, polygon: Polygon
) -> list[tuple[TimeStamp, float]]:
    """Per-timestamp zonal mean over a same-grid raster stack."""
    if len(stack) < 2:
        raise UnsortedStack(f"need >= 2 dated rasters, got {len(stack)}")
    times = [r.timestamp for r in stack]
    if any(t is None for t in times):
        raise UnsortedStack("every raster in the stack needs a timestamp")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise UnsortedStack(f"timestamps must be strictly increasing, got {times}")
    first = stack[0]
    if any(not r.same_grid(first) for r in stack[1:]):
        raise UnsortedStack("stack rasters must share one grid")
    out = []
    for raster in stack:
        stats = zonal_stats(raster, band, polygon)
        out.append((raster.timestamp, stats["mean"]))
    return out
