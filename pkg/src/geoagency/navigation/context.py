"""Grounded navigation: pick what to look at.

Turns a query kind plus workspace state into a context bundle: sub-ROIs,
time slices, zoom, layer views, and an ordered patch list chosen by one
of four sampling strategies. Pure function of a workspace snapshot, so
identical inputs give identical bundles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..core.geometry import BBox, TimeStamp
from ..core.raster import GridRaster
from ..core.workspace import Workspace
from ..embeddings import EmbeddingIndex, SyntheticProvider, cell_id, diversity_sample
from ..errors import AllNoData, BudgetZero, NoLayers, ParamSchemaError

EMBEDDINGS_LAYER = "embeddings"
EMBEDDINGS_T2_LAYER = "embeddings_t2"


class QueryKind(str, enum.Enum):
    EXPLORE = "explore"
    QUALITY_CONTROL = "quality_control"
    MAP = "map"
    CHANGE_DETECT = "change_detect"


class Strategy(str, enum.Enum):
    DIVERSITY = "diversity"
    UNCERTAINTY = "uncertainty"
    COVERAGE = "coverage"
    TEMPORAL_CONTRAST = "temporal_contrast"


STRATEGY_FOR_QUERY = {
    QueryKind.EXPLORE: Strategy.DIVERSITY,
    QueryKind.QUALITY_CONTROL: Strategy.UNCERTAINTY,
    QueryKind.MAP: Strategy.COVERAGE,
    QueryKind.CHANGE_DETECT: Strategy.TEMPORAL_CONTRAST,
}


@dataclass(frozen=True)
class PatchRef:
    bbox: BBox
    timestamp: TimeStamp
    layer_view: str
    cell_ids: tuple[str, ...]
    zoom: int

    def __post_init__(self):
        if not self.cell_ids:
            raise ParamSchemaError("patch must cover at least one cell")

    def to_json(self) -> dict:
        return {
            "bbox": list(self.bbox.as_tuple()),
            "timestamp": self.timestamp,
            "layer_view": self.layer_view,
            "cell_ids": list(self.cell_ids),
            "zoom": self.zoom,
        }


@dataclass
class ContextBundle:
    sub_rois: list[BBox]
    time_slices: list[TimeStamp]
    zoom_level: int
    layer_views: list[str]
    strategy: Strategy
    patches: list[PatchRef] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sub_rois": [list(b.as_tuple()) for b in self.sub_rois],
            "time_slices": self.time_slices,
            "zoom_level": self.zoom_level,
            "layer_views": self.layer_views,
            "strategy": self.strategy.value,
            "patches": [p.to_json() for p in self.patches],
        }


def zoom_for_tile(roi_box: BBox, tile_side: float) -> int:
    """Zoom 0 = whole ROI in one tile; each level halves the tile side."""
    span = max(roi_box.width, roi_box.height)
    if tile_side >= span:
        return 0
    return max(0, math.ceil(math.log2(span / tile_side)))


def _cell_patch(raster: GridRaster, idx: int, layer_view: str, timestamp: TimeStamp, zoom: int) -> PatchRef:
    return PatchRef(
        bbox=raster.cell_bbox(idx),
        timestamp=timestamp,
        layer_view=layer_view,
        cell_ids=(cell_id(idx),),
        zoom=zoom,
    )


def sample_uncertainty(
    confidence_map: GridRaster, patch_budget: int, band: str = "confidence",
    layer_view: str = "rgb",
) -> list[PatchRef]:
    """Patches on the lowest-confidence cells; ties in (row, col) order."""
    if patch_budget < 1:
        raise BudgetZero(f"patch budget must be >= 1, got {patch_budget}")
    values = confidence_map.band(band)
    valid = np.nonzero(values != confidence_map.nodata)[0]
    if valid.size == 0:
        raise AllNoData("confidence map has no valid cells")
    bad = values[valid]
    if np.any((bad < 0) | (bad > 1)):
        raise ParamSchemaError("confidence values must lie in [0, 1]")
    order = valid[np.argsort(bad, kind="stable")]
    ts = confidence_map.timestamp if confidence_map.timestamp is not None else 0
    zoom = zoom_for_tile(confidence_map.extent(), confidence_map.cell_size)
    return [
        _cell_patch(confidence_map, int(idx), layer_view, ts, zoom)
        for idx in order[:patch_budget]
    ]


def _diversity_patches(raster: GridRaster, budget: int, layer_view: str) -> list[PatchRef]:
    provider = SyntheticProvider(raster)
    index = EmbeddingIndex(provider.embed_all())
    k = min(budget, len(index))
    picked = diversity_sample(index, k)
    ts = raster.timestamp if raster.timestamp is not None else 0
    zoom = zoom_for_tile(raster.extent(), raster.cell_size)
    from ..embeddings import cell_index

    return [_cell_patch(raster, cell_index(i), layer_view, ts, zoom) for i in picked]


def _coverage_patches(raster: GridRaster, budget: int, stride: int, layer_view: str) -> list[PatchRef]:
    if stride < 1:
        raise ParamSchemaError(f"stride must be >= 1, got {stride}")
    tiles = []
    for row0 in range(0, raster.height, stride):
        for col0 in range(0, raster.width, stride):
            rows = range(row0, min(row0 + stride, raster.height))
            cols = range(col0, min(col0 + stride, raster.width))
            ids = tuple(cell_id(r * raster.width + c) for r in rows for c in cols)
            first = rows[0] * raster.width + cols[0]
            last = rows[-1] * raster.width + cols[-1]
            b0 = raster.cell_bbox(first)
            b1 = raster.cell_bbox(last)
            tiles.append((BBox(b0.min_x, b0.min_y, b1.max_x, b1.max_y), ids))
    ts = raster.timestamp if raster.timestamp is not None else 0
    zoom = zoom_for_tile(raster.extent(), stride * raster.cell_size)
    return [
        PatchRef(bbox=b, timestamp=ts, layer_view=layer_view, cell_ids=ids, zoom=zoom)
        for b, ids in tiles[:budget]
    ]


def _temporal_contrast_patches(
    before: GridRaster, after: GridRaster, budget: int, layer_view: str
) -> list[PatchRef]:
    m1 = SyntheticProvider(before).matrix()
    m2 = SyntheticProvider(after).matrix()
    if m1.shape != m2.shape:
        raise ParamSchemaError("temporal contrast needs same-grid embedding rasters")
    delta = np.linalg.norm(m2 - m1, axis=1)
    order = np.argsort(-delta, kind="stable")  # descending, ties by cell index
    ts = after.timestamp if after.timestamp is not None else 0
    zoom = zoom_for_tile(after.extent(), after.cell_size)
    return [_cell_patch(after, int(i), layer_view, ts, zoom) for i in order[:budget]]


def build_context(
    query_kind: QueryKind,
    workspace: Workspace,
    patch_budget: int,
    params: dict | None = None,
) -> ContextBundle:
    if patch_budget < 1:
        raise BudgetZero(f"patch budget must be >= 1, got {patch_budget}")
    if not workspace.rasters:
        raise NoLayers("workspace has no raster layers to navigate")
    params = dict(params or {})
    layer_view = params.get("layer_view", "rgb")
    strategy = STRATEGY_FOR_QUERY[QueryKind(query_kind)]

    if strategy == Strategy.DIVERSITY:
        name = params.get("embeddings_layer", EMBEDDINGS_LAYER)
        if name not in workspace.rasters:
            raise NoLayers(f"no embedding layer {name!r}")
        patches = _diversity_patches(workspace.rasters[name], patch_budget, layer_view)
    elif strategy == Strategy.UNCERTAINTY:
        name = params.get("confidence_layer")
        if not name or name not in workspace.rasters:
            raise NoLayers(f"no confidence layer {name!r}")
        patches = sample_uncertainty(
            workspace.rasters[name],
            patch_budget,
            band=params.get("confidence_band", "confidence"),
            layer_view=layer_view,
        )
    elif strategy == Strategy.COVERAGE:
        name = params.get("grid_layer", EMBEDDINGS_LAYER)
        if name not in workspace.rasters:
            raise NoLayers(f"no grid layer {name!r}")
        patches = _coverage_patches(
            workspace.rasters[name], patch_budget, int(params.get("stride", 4)), layer_view
        )
    else:  # TEMPORAL_CONTRAST
        before = params.get("before_layer", EMBEDDINGS_LAYER)
        after = params.get("after_layer", EMBEDDINGS_T2_LAYER)
        for name in (before, after):
            if name not in workspace.rasters:
                raise NoLayers(f"no embedding layer {name!r}")
        patches = _temporal_contrast_patches(
            workspace.rasters[before], workspace.rasters[after], patch_budget, layer_view
        )

    time_slices = sorted({p.timestamp for p in patches})
    zoom = patches[0].zoom if patches else 0
    return ContextBundle(
        sub_rois=[workspace.roi.bbox()],
        time_slices=time_slices,
        zoom_level=zoom,
        layer_views=[layer_view],
        strategy=strategy,
        patches=patches,
    )
