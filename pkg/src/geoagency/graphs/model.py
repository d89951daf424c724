"""Compute graph construction: validated DAG with a stable content hash.

The graph is data (inspectable before execution); node semantics live in
ops.py. Hashing is over canonical JSON (sorted keys) so the same spec
always produces the same graph_hash.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field

from ..errors import CycleDetected, ParamSchemaError, UnknownOp


class OpKind(str, enum.Enum):
    NDVI_INDEX = "ndvi_index"
    ZONAL_STATS = "zonal_stats"
    MASK_APPLY = "mask_apply"
    THRESHOLD = "threshold"
    TIME_SERIES_EXTRACT = "time_series_extract"
    TRAIN_LIGHTWEIGHT = "train_lightweight"
    PREDICT_SURFACE = "predict_surface"
    PERCEIVE = "perceive"
    ATTACH_ATTRIBUTES = "attach_attributes"
    EXPORT = "export"


# op -> (min_inputs, max_inputs, required params, optional params)
_OP_SIGNATURES: dict[OpKind, tuple[int, int, dict[str, type], dict[str, type]]] = {
    OpKind.NDVI_INDEX: (0, 1, {}, {"layer": str, "red_band": str, "nir_band": str}),
    OpKind.ZONAL_STATS: (0, 1, {"band": str, "vector_layer": str}, {"layer": str, "feature_id": str}),
    OpKind.MASK_APPLY: (2, 2, {}, {"mask_band": str}),
    OpKind.THRESHOLD: (1, 1, {"band": str, "value": (int, float)}, {"op": str}),
    OpKind.TIME_SERIES_EXTRACT: (0, 0, {"layer_prefix": str, "band": str, "vector_layer": str, "feature_id": str}, {}),
    OpKind.TRAIN_LIGHTWEIGHT: (0, 0, {"labels_layer": str, "embeddings_layer": str}, {"temperature": (int, float)}),
    OpKind.PREDICT_SURFACE: (1, 1, {"embeddings_layer": str}, {"mask_layer": str, "mask_band": str}),
    OpKind.PERCEIVE: (0, 0, {"task": str, "question": str, "cell_ids": list}, {"classes": list, "layer_view": str, "zoom": int}),
    OpKind.ATTACH_ATTRIBUTES: (0, 0, {"vector_layer": str, "feature_id": str}, {"shape_metrics": bool, "zonal": list, "series": list}),
    OpKind.EXPORT: (1, 1, {"name": str}, {}),
}

_THRESHOLD_OPS = {"ge", "gt", "le", "lt"}


@dataclass(frozen=True)
class GraphNode:
    id: str
    op_kind: OpKind
    params: dict = field(default_factory=dict)
    inputs: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "op": self.op_kind.value,
            "params": self.params,
            "inputs": list(self.inputs),
        }


@dataclass
class ComputeGraph:
    nodes: dict[str, GraphNode]
    outputs: list[str]
    graph_hash: str
    topo_order: list[str]

    def to_json(self) -> dict:
        return {
            "nodes": [self.nodes[i].to_json() for i in sorted(self.nodes)],
            "outputs": list(self.outputs),
            "graph_hash": self.graph_hash,
        }


def _validate_params(node_id: str, op: OpKind, params: dict) -> None:
    _, _, required, optional = _OP_SIGNATURES[op]
    allowed = set(required) | set(optional)
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise ParamSchemaError(f"node {node_id!r}: unknown params {unknown} for {op.value}")
    missing = sorted(set(required) - set(params))
    if missing:
        raise ParamSchemaError(f"node {node_id!r}: missing params {missing} for {op.value}")
    for key, value in params.items():
        expected = required.get(key, optional.get(key))
        if not isinstance(value, expected):
            raise ParamSchemaError(
                f"node {node_id!r}: param {key!r} must be {expected}, got {type(value).__name__}"
            )
    if op == OpKind.THRESHOLD and params.get("op", "ge") not in _THRESHOLD_OPS:
        raise ParamSchemaError(
            f"node {node_id!r}: threshold op must be one of {sorted(_THRESHOLD_OPS)}"
        )
    if op == OpKind.NDVI_INDEX and "layer" not in params:
        # Without an input edge the source layer must come from params.
        pass


def _canonical_spec(nodes: list[dict], outputs: list[str]) -> str:
    spec = {
        "nodes": sorted(
            (
                {
                    "id": n["id"],
                    "op": n["op"],
                    "params": n.get("params", {}),
                    "inputs": list(n.get("inputs", ())),
                }
                for n in nodes
            ),
            key=lambda n: n["id"],
        ),
        "outputs": list(outputs),
    }
    return json.dumps(spec, sort_keys=True, separators=(",", ":"))


def _topological_order(nodes: dict[str, GraphNode]) -> list[str]:
    indegree = {i: 0 for i in nodes}
    dependents: dict[str, list[str]] = {i: [] for i in nodes}
    for node in nodes.values():
        for src in node.inputs:
            indegree[node.id] += 1
            dependents[src].append(node.id)
    ready = sorted(i for i, d in indegree.items() if d == 0)
    order = []
    while ready:
        current = ready.pop(0)
        order.append(current)
        changed = False
        for dep in dependents[current]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                ready.append(dep)
                changed = True
        if changed:
            ready.sort()
    if len(order) != len(nodes):
        raise CycleDetected("graph contains a cycle")
    return order


def build_graph(spec: dict, max_nodes: int | None = None) -> ComputeGraph:
    """Validate a graph spec and pin its content hash.

    spec = {"nodes": [{"id", "op", "params", "inputs"}...], "outputs": [...]}
    """
    raw_nodes = spec.get("nodes", [])
    outputs = list(spec.get("outputs", []))
    if not raw_nodes:
        raise ParamSchemaError("graph needs at least one node")
    if not outputs:
        raise ParamSchemaError("graph needs at least one output node")
    if max_nodes is not None and len(raw_nodes) > max_nodes:
        raise ParamSchemaError(f"graph has {len(raw_nodes)} nodes, budget allows {max_nodes}")

    nodes: dict[str, GraphNode] = {}
    for raw in raw_nodes:
        node_id = raw.get("id")
        if not node_id or not isinstance(node_id, str):
            raise ParamSchemaError(f"node id must be a non-empty string, got {node_id!r}")
        if node_id in nodes:
            raise ParamSchemaError(f"duplicate node id {node_id!r}")
        try:
            op = OpKind(raw.get("op"))
        except ValueError:
            raise UnknownOp(f"unknown op {raw.get('op')!r}") from None
        params = dict(raw.get("params", {}))
        inputs = tuple(raw.get("inputs", ()))
        _validate_params(node_id, op, params)
        lo, hi, _, _ = _OP_SIGNATURES[op]
        if not (lo <= len(inputs) <= hi):
            raise ParamSchemaError(
                f"node {node_id!r}: {op.value} takes {lo}..{hi} inputs, got {len(inputs)}"
            )
        nodes[node_id] = GraphNode(id=node_id, op_kind=op, params=params, inputs=inputs)

    for node in nodes.values():
        for src in node.inputs:
            if src not in nodes:
                raise ParamSchemaError(f"node {node.id!r} references unknown input {src!r}")
            if src == node.id:
                raise CycleDetected(f"node {node.id!r} references itself")
    for out in outputs:
        if out not in nodes:
            raise ParamSchemaError(f"output {out!r} is not a node")

    order = _topological_order(nodes)
    digest = hashlib.sha256(
        _canonical_spec([n.to_json() for n in nodes.values()], outputs).encode("utf-8")
    ).hexdigest()
    return ComputeGraph(nodes=nodes, outputs=outputs, graph_hash=digest, topo_order=order)
