"""Node semantics and the cost model for compute graphs.

Node payloads are either rasters or JSON-safe reports. Model payloads
(centroids) hex-encode their floats so a resumed run decodes bit-identical
state. Costs are computable before a node runs: raster-wide ops bill
ceil(cells/1000) cost units (min 1), Perceive bills one cost unit plus one
perceptor call, everything else bills 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..attribution import AttributionRequest, compute_attributes
from ..core.attributes import encode_attribute
from ..core.raster import GridRaster
from ..core.vector import LabelStatus
from ..core.workspace import Workspace
from ..core.zonal import extract_time_series, zonal_stats
from ..dual import fit_and_predict
from ..dual.model import NearestCentroidModel
from ..embeddings import EmbeddingIndex, SyntheticProvider, cell_id, cell_index
from ..errors import BandMismatch, MissingLayer, RuntimeOpError
from ..navigation import PatchRef
from ..perception import PerceptionQuery, PerceptorRegistry, TaskKind
from .model import GraphNode, OpKind


class PayloadKind(str, enum.Enum):
    RASTER = "raster"
    REPORT = "report"


@dataclass
class NodePayload:
    kind: PayloadKind
    raster: GridRaster | None = None
    report: dict | None = None


def _encode_matrix(matrix: np.ndarray) -> list[list[str]]:
    return [[float(v).hex() for v in row] for row in matrix]


def _decode_matrix(rows: list[list[str]]) -> np.ndarray:
    return np.array([[float.fromhex(v) for v in row] for row in rows], dtype=np.float64)


def _require_layer(workspace: Workspace, name: str, node_id: str) -> GridRaster:
    if name not in workspace.rasters:
        raise MissingLayer(f"node {node_id!r} needs raster layer {name!r}")
    return workspace.rasters[name]


def _require_vector(workspace: Workspace, name: str, node_id: str):
    if name not in workspace.vectors:
        raise MissingLayer(f"node {node_id!r} needs vector layer {name!r}")
    return workspace.vectors[name]


def _input_raster(inputs: list[NodePayload], pos: int, node_id: str) -> GridRaster:
    payload = inputs[pos]
    if payload.kind != PayloadKind.RASTER or payload.raster is None:
        raise RuntimeOpError(node_id, f"input {pos} is not a raster")
    return payload.raster


def validate_layers(node: GraphNode, workspace: Workspace) -> None:
    """Pre-execution layer existence check (MissingLayer before any work)."""
    p = node.params
    kind = node.op_kind
    if kind == OpKind.NDVI_INDEX and not node.inputs:
        _require_layer(workspace, p.get("layer", "s2"), node.id)
    elif kind == OpKind.ZONAL_STATS:
        if not node.inputs:
            _require_layer(workspace, p.get("layer", "ndvi"), node.id)
        _require_vector(workspace, p["vector_layer"], node.id)
    elif kind == OpKind.TIME_SERIES_EXTRACT:
        _require_vector(workspace, p["vector_layer"], node.id)
        if not _dated_stack(workspace, p["layer_prefix"]):
            raise MissingLayer(f"node {node.id!r}: no dated rasters match {p['layer_prefix']!r}")
    elif kind == OpKind.TRAIN_LIGHTWEIGHT:
        _require_vector(workspace, p["labels_layer"], node.id)
        _require_layer(workspace, p["embeddings_layer"], node.id)
    elif kind == OpKind.PREDICT_SURFACE:
        _require_layer(workspace, p["embeddings_layer"], node.id)
        if "mask_layer" in p:
            _require_layer(workspace, p["mask_layer"], node.id)
    elif kind == OpKind.ATTACH_ATTRIBUTES:
        _require_vector(workspace, p["vector_layer"], node.id)


def node_cost(node: GraphNode, workspace: Workspace) -> tuple[int, int]:
    """(cost units, perceptor calls) billed by this node, known pre-run."""

    def cells(name: str) -> int:
        raster = workspace.rasters.get(name)
        return raster.n_cells if raster is not None else 0

    p = node.params
    kind = node.op_kind
    if kind == OpKind.PERCEIVE:
        return 1, 1
    if kind == OpKind.NDVI_INDEX:
        touched = cells(p.get("layer", "s2"))
    elif kind in (OpKind.THRESHOLD, OpKind.MASK_APPLY):
        touched = max((cells(n) for n in workspace.rasters), default=0)
    elif kind == OpKind.ZONAL_STATS:
        touched = cells(p.get("layer", "ndvi"))
    elif kind == OpKind.TIME_SERIES_EXTRACT:
        stack = _dated_stack(workspace, p["layer_prefix"])
        touched = sum(r.n_cells for r in stack)
    elif kind == OpKind.TRAIN_LIGHTWEIGHT:
        touched = cells(p["embeddings_layer"])
    elif kind == OpKind.PREDICT_SURFACE:
        touched = cells(p["embeddings_layer"])
    else:  # ATTACH_ATTRIBUTES, EXPORT
        touched = 0
    return max(1, math.ceil(touched / 1000)), 0


def _dated_stack(workspace: Workspace, prefix: str) -> list[GridRaster]:
    stack = [
        r
        for name, r in workspace.rasters.items()
        if name.startswith(prefix) and r.timestamp is not None
    ]
    stack.sort(key=lambda r: r.timestamp)
    return stack


def op_ndvi(raster: GridRaster, red_band: str = "red", nir_band: str = "nir") -> GridRaster:
    """(nir - red) / (nir + red); nodata where the sum is 0 or inputs are nodata."""
    if red_band not in raster.bands or nir_band not in raster.bands:
        raise BandMismatch(f"raster lacks bands {red_band!r}/{nir_band!r}")
    red = raster.bands[red_band]
    nir = raster.bands[nir_band]
    out = np.full(raster.n_cells, raster.nodata, dtype=np.float64)
    total = nir + red
    ok = (red != raster.nodata) & (nir != raster.nodata) & (total != 0.0)
    out[ok] = (nir[ok] - red[ok]) / total[ok]
    return GridRaster(
        origin=raster.origin,
        cell_size=raster.cell_size,
        width=raster.width,
        height=raster.height,
        bands={"ndvi": out},
        nodata=raster.nodata,
        timestamp=raster.timestamp,
    )


def op_threshold(raster: GridRaster, band: str, value: float, op: str = "ge") -> GridRaster:
    data = raster.band(band)
    compare = {
        "ge": data >= value,
        "gt": data > value,
        "le": data <= value,
        "lt": data < value,
    }[op]
    out = np.where(compare, 1.0, 0.0)
    out[data == raster.nodata] = raster.nodata
    return GridRaster(
        origin=raster.origin,
        cell_size=raster.cell_size,
        width=raster.width,
        height=raster.height,
        bands={"mask": out},
        nodata=raster.nodata,
        timestamp=raster.timestamp,
    )


def op_mask_apply(data: GridRaster, mask: GridRaster, mask_band: str = "mask") -> GridRaster:
    if not data.same_grid(mask):
        raise BandMismatch("data and mask rasters are not co-registered")
    keep = mask.band(mask_band) == 1.0
    bands = {}
    for name, values in data.bands.items():
        out = values.copy()
        out[~keep] = data.nodata
        bands[name] = out
    return GridRaster(
        origin=data.origin,
        cell_size=data.cell_size,
        width=data.width,
        height=data.height,
        bands=bands,
        nodata=data.nodata,
        timestamp=data.timestamp,
    )


def _labeled_examples(layer, index: EmbeddingIndex):
    examples = []
    for feature in layer.features:
        if feature.status in (LabelStatus.COMMITTED, LabelStatus.ACCEPTED) and feature.label:
            if feature.id in index:
                examples.append((index.vector(feature.id), feature.label))
    return examples


def run_node(
    node: GraphNode,
    inputs: list[NodePayload],
    workspace: Workspace,
    registry: PerceptorRegistry | None,
) -> NodePayload:
    p = node.params
    kind = node.op_kind
    try:
        if kind == OpKind.NDVI_INDEX:
            raster = (
                _input_raster(inputs, 0, node.id)
                if node.inputs
                else _require_layer(workspace, p.get("layer", "s2"), node.id)
            )
            return NodePayload(
                PayloadKind.RASTER,
                raster=op_ndvi(raster, p.get("red_band", "red"), p.get("nir_band", "nir")),
            )

        if kind == OpKind.THRESHOLD:
            raster = _input_raster(inputs, 0, node.id)
            return NodePayload(
                PayloadKind.RASTER,
                raster=op_threshold(raster, p["band"], float(p["value"]), p.get("op", "ge")),
            )

        if kind == OpKind.MASK_APPLY:
            data = _input_raster(inputs, 0, node.id)
            mask = _input_raster(inputs, 1, node.id)
            return NodePayload(
                PayloadKind.RASTER,
                raster=op_mask_apply(data, mask, p.get("mask_band", "mask")),
            )

        if kind == OpKind.ZONAL_STATS:
            raster = (
                _input_raster(inputs, 0, node.id)
                if node.inputs
                else _require_layer(workspace, p.get("layer", "ndvi"), node.id)
            )
            layer = _require_vector(workspace, p["vector_layer"], node.id)
            features = (
                [layer.get(p["feature_id"])] if "feature_id" in p else list(layer.features)
            )
            if "feature_id" in p and features[0] is None:
                raise RuntimeOpError(node.id, f"no feature {p['feature_id']!r}")
            report = {
                f.id: zonal_stats(raster, p["band"], f.geometry) for f in features
            }
            return NodePayload(PayloadKind.REPORT, report={"zonal_stats": report})

        if kind == OpKind.TIME_SERIES_EXTRACT:
            layer = _require_vector(workspace, p["vector_layer"], node.id)
            feature = layer.get(p["feature_id"])
            if feature is None:
                raise RuntimeOpError(node.id, f"no feature {p['feature_id']!r}")
            stack = _dated_stack(workspace, p["layer_prefix"])
            series = extract_time_series(stack, p["band"], feature.geometry)
            return NodePayload(
                PayloadKind.REPORT,
                report={"series": [[t, v] for t, v in series], "feature_id": feature.id},
            )

        if kind == OpKind.TRAIN_LIGHTWEIGHT:
            layer = _require_vector(workspace, p["labels_layer"], node.id)
            raster = _require_layer(workspace, p["embeddings_layer"], node.id)
            index = EmbeddingIndex(SyntheticProvider(raster).embed_all())
            examples = _labeled_examples(layer, index)
            model = NearestCentroidModel(temperature=float(p.get("temperature", 1.0)))
            model.fit(examples)
            return NodePayload(
                PayloadKind.REPORT,
                report={
                    "model": {
                        "classes": model.classes,
                        "centroids": _encode_matrix(model.centroids),
                        "temperature": model.temperature,
                        "training_digest": model.training_digest(examples),
                    }
                },
            )

        if kind == OpKind.PREDICT_SURFACE:
            payload = inputs[0]
            if payload.kind != PayloadKind.REPORT or "model" not in (payload.report or {}):
                raise RuntimeOpError(node.id, "input is not a trained model")
            spec = payload.report["model"]
            raster = _require_layer(workspace, p["embeddings_layer"], node.id)
            index = EmbeddingIndex(SyntheticProvider(raster).embed_all())
            pool = [cell_id(i) for i in range(raster.n_cells)]
            if "mask_layer" in p:
                mask = _require_layer(workspace, p["mask_layer"], node.id)
                keep = mask.band(p.get("mask_band", "mask")) == 1.0
                pool = [cell_id(i) for i in range(raster.n_cells) if keep[i]]
            model = NearestCentroidModel(temperature=float(spec["temperature"]))
            model.classes = list(spec["classes"])
            model.centroids = _decode_matrix(spec["centroids"])
            rows = np.array([cell_index(i) for i in pool], dtype=np.int64)
            xs = index.matrix[[index.ids.index(i) for i in pool]]
            classes, probs = model.predict_proba_batch(xs)
            bands = {}
            for k, cls in enumerate(classes):
                band = np.full(raster.n_cells, raster.nodata, dtype=np.float64)
                band[rows] = probs[:, k]
                bands[f"p_{cls}"] = band
            surface = GridRaster(
                origin=raster.origin,
                cell_size=raster.cell_size,
                width=raster.width,
                height=raster.height,
                bands=bands,
                nodata=raster.nodata,
                timestamp=raster.timestamp,
            )
            return NodePayload(PayloadKind.RASTER, raster=surface)

        if kind == OpKind.PERCEIVE:
            if registry is None:
                raise RuntimeOpError(node.id, "no perceptor registry wired into execution")
            grid = next(iter(workspace.rasters.values()), None)
            if grid is None:
                raise MissingLayer(f"node {node.id!r} needs at least one raster for patches")
            patches = tuple(
                PatchRef(
                    bbox=grid.cell_bbox(int(i)),
                    timestamp=grid.timestamp if grid.timestamp is not None else 0,
                    layer_view=p.get("layer_view", "rgb"),
                    cell_ids=(cell_id(int(i)),),
                    zoom=int(p.get("zoom", 8)),
                )
                for i in p["cell_ids"]
            )
            query = PerceptionQuery(
                patches=patches,
                task=TaskKind(p["task"]),
                question=p["question"],
                classes=tuple(p.get("classes", ())),
            )
            results = registry.perceive(query)
            return NodePayload(
                PayloadKind.REPORT,
                report={
                    "results": [r.to_json() for r in results],
                    "cell_ids": [cell_id(int(i)) for i in p["cell_ids"]],
                },
            )

        if kind == OpKind.ATTACH_ATTRIBUTES:
            layer = _require_vector(workspace, p["vector_layer"], node.id)
            feature = layer.get(p["feature_id"])
            if feature is None:
                raise RuntimeOpError(node.id, f"no feature {p['feature_id']!r}")
            request = AttributionRequest(
                feature_id=feature.id,
                shape_metrics=bool(p.get("shape_metrics", False)),
                zonal=tuple(tuple(z) for z in p.get("zonal", [])),
                series=tuple(tuple(s) for s in p.get("series", [])),
            )
            values = compute_attributes(request, feature, workspace)
            return NodePayload(
                PayloadKind.REPORT,
                report={
                    "feature_id": feature.id,
                    "attributes": {k: encode_attribute(v) for k, v in values.items()},
                },
            )

        if kind == OpKind.EXPORT:
            return inputs[0]

    except RuntimeOpError:
        raise
    except MissingLayer:
        raise
    except Exception as exc:
        raise RuntimeOpError(node.id, str(exc)) from exc

    raise RuntimeOpError(node.id, f"unhandled op {kind.value}")
