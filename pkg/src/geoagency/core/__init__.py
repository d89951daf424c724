from .attributes import AttributeValue, Category, ImageRef, Number, Series, Text
from .artifacts import Artifact, ArtifactKind, ProvenanceRecord, parameter_digest
from .bundle import load_workspace, save_workspace, workspaces_equal
from .geometry import (
    BBox,
    GeoPoint,
    Polygon,
    PreparedPolygon,
    TimeStamp,
    TimeWindow,
    bbox_to_polygon,
    point_in_polygon,
    point_to_square,
    polygon_area,
    polygon_intersects_bbox,
    polygon_perimeter,
    polygons_intersect,
)
from .raster import DEFAULT_NODATA, GridRaster, read_gridr, write_gridr
from .vector import (
    CRS_TAG,
    Feature,
    LabelOrigin,
    LabelStatus,
    VectorLayer,
    check_transition,
    feature_from_geojson,
    feature_to_geojson,
    layer_from_geojson,
    layer_to_geojson,
    polygon_from_geojson,
    polygon_to_geojson,
)
from .workspace import Workspace
from .zonal import cells_covered, extract_time_series, zonal_stats

__all__ = [
    "AttributeValue", "Category", "ImageRef", "Number", "Series", "Text",
    "Artifact", "ArtifactKind", "ProvenanceRecord", "parameter_digest",
    "load_workspace", "save_workspace", "workspaces_equal",
    "BBox", "GeoPoint", "Polygon", "PreparedPolygon", "TimeStamp", "TimeWindow",
    "bbox_to_polygon", "point_in_polygon", "point_to_square", "polygon_area",
    "polygon_intersects_bbox", "polygon_perimeter", "polygons_intersect",
    "DEFAULT_NODATA", "GridRaster", "read_gridr", "write_gridr",
    "CRS_TAG", "Feature", "LabelOrigin", "LabelStatus", "VectorLayer",
    "check_transition", "feature_from_geojson", "feature_to_geojson",
    "layer_from_geojson", "layer_to_geojson", "polygon_from_geojson",
    "polygon_to_geojson", "Workspace",
    "cells_covered", "extract_time_series", "zonal_stats",
]
