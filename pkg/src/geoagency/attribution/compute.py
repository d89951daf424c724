"""Computed attributes: zonal stats, shape metrics, and time series."""

from __future__ import annotations

import math

from ..core.attributes import AttributeValue, Number, Series
from ..core.geometry import Polygon, polygon_area, polygon_perimeter
from ..core.raster import GridRaster
from ..core.zonal import extract_time_series, zonal_stats


def compactness(polygon: Polygon) -> float:
    """Polsby-Popper 4*pi*A/P^2; 1.0 for a disc, pi/4 for any square."""
    perimeter = polygon_perimeter(polygon)
    return 4.0 * math.pi * polygon_area(polygon) / (perimeter * perimeter)


def shape_attributes(polygon: Polygon) -> dict[str, AttributeValue]:
    return {
        "shape.area_m2": Number(polygon_area(polygon), "m^2"),
        "shape.perimeter_m": Number(polygon_perimeter(polygon), "m"),
        "shape.compactness": Number(compactness(polygon), "ratio"),
    }


def zonal_attributes(
    raster: GridRaster, band: str, polygon: Polygon, prefix: str
) -> dict[str, AttributeValue]:
    stats = zonal_stats(raster, band, polygon)
    return {
        f"computed.{prefix}_mean": Number(stats["mean"]),
        f"computed.{prefix}_min": Number(stats["min"]),
        f"computed.{prefix}_max": Number(stats["max"]),
        f"computed.{prefix}_count": Number(stats["count"], "cells"),
    }


def series_attribute(
    stack: list[GridRaster], band: str, polygon: Polygon, name: str
) -> dict[str, AttributeValue]:
    points = extract_time_series(stack, band, polygon)
    return {f"computed.{name}_series": Series(tuple(points), name)}
