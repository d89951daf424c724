"""Budgeted graph execution with partial results and resumption.

Budgets are enforced by node-level pre-admission: execution halts before a
node that would push any budget dimension over its per-call limit, and the
report carries a continuation token. Every completed node materializes its
payload as a workspace artifact, so resuming on the unchanged workspace
replays nothing and ends with artifacts bit-identical to an unbudgeted run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..core.artifacts import Artifact, ArtifactKind, ProvenanceRecord, parameter_digest
from ..core.geometry import TimeStamp
from ..core.workspace import Workspace
from ..errors import RuntimeOpError, SchemaError
from ..perception import PerceptorRegistry
from .model import ComputeGraph
from .ops import NodePayload, PayloadKind, node_cost, run_node, validate_layers

UNLIMITED = None


@dataclass(frozen=True)
class Budget:
    max_nodes: int | None = UNLIMITED
    max_cost_units: int | None = UNLIMITED
    max_perceptor_calls: int | None = UNLIMITED

    def __post_init__(self):
        for name, value in (
            ("max_nodes", self.max_nodes),
            ("max_cost_units", self.max_cost_units),
            ("max_perceptor_calls", self.max_perceptor_calls),
        ):
            if value is not None and value < 0:
                raise SchemaError(f"{name} must be >= 0 or unlimited")

    @classmethod
    def from_json(cls, obj: dict) -> "Budget":
        return cls(
            max_nodes=obj.get("max_nodes"),
            max_cost_units=obj.get("max_cost_units"),
            max_perceptor_calls=obj.get("max_perceptor_calls"),
        )

    def to_json(self) -> dict:
        return {
            "max_nodes": self.max_nodes,
            "max_cost_units": self.max_cost_units,
            "max_perceptor_calls": self.max_perceptor_calls,
        }


class ExecutionStatus(str, enum.Enum):
    COMPLETE = "complete"
    PARTIAL = "partial"


@dataclass
class ContinuationToken:
    graph_hash: str
    completed: list[str]
    artifact_ids: dict[str, str]  # node id -> artifact id

    def to_json(self) -> dict:
        return {
            "graph_hash": self.graph_hash,
            "completed": list(self.completed),
            "artifact_ids": dict(self.artifact_ids),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ContinuationToken":
        return cls(
            graph_hash=obj["graph_hash"],
            completed=list(obj["completed"]),
            artifact_ids=dict(obj["artifact_ids"]),
        )


@dataclass
class ExecutionReport:
    status: ExecutionStatus
    completed: list[str]
    produced_artifacts: list[str]
    cost_units: int
    perceptor_calls: int
    nodes_run: int
    continuation: ContinuationToken | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "completed": list(self.completed),
            "produced_artifacts": list(self.produced_artifacts),
            "cost_units": self.cost_units,
            "perceptor_calls": self.perceptor_calls,
            "nodes_run": self.nodes_run,
            "continuation": self.continuation.to_json() if self.continuation else None,
        }


def _artifact_id(graph: ComputeGraph, node_id: str) -> str:
    return f"g{graph.graph_hash[:10]}.{node_id}"


def _materialize(
    graph: ComputeGraph,
    node_id: str,
    payload: NodePayload,
    workspace: Workspace,
    input_ids: list[str],
    now: TimeStamp,
) -> str:
    artifact_id = _artifact_id(graph, node_id)
    node = graph.nodes[node_id]
    if payload.kind == PayloadKind.RASTER:
        kind = ArtifactKind.RASTER
        payload_ref = artifact_id
        inline = None
    else:
        kind = ArtifactKind.REPORT
        payload_ref = node_id
        inline = payload.report
    artifact = Artifact(
        id=artifact_id,
        kind=kind,
        payload_ref=payload_ref,
        payload=inline,
        provenance=ProvenanceRecord(
            producer=graph.graph_hash,
            input_artifact_ids=tuple(input_ids),
            created_at=now,
            param_digest=parameter_digest(node.params),
        ),
    )
    if artifact_id in workspace.artifacts:
        # Same graph re-run on the same workspace: payloads are deterministic,
        # so reuse instead of rejecting the duplicate id.
        if payload.kind == PayloadKind.RASTER:
            workspace.rasters[artifact_id] = payload.raster
        return artifact_id
    if payload.kind == PayloadKind.RASTER:
        workspace.rasters[artifact_id] = payload.raster
    workspace.register_artifact(artifact)
    return artifact_id


def _load_payload(workspace: Workspace, artifact_id: str) -> NodePayload:
    artifact = workspace.artifacts.get(artifact_id)
    if artifact is None:
        raise SchemaError(f"continuation references missing artifact {artifact_id!r}")
    if artifact.kind == ArtifactKind.RASTER:
        return NodePayload(PayloadKind.RASTER, raster=workspace.rasters[artifact.payload_ref])
    return NodePayload(PayloadKind.REPORT, report=artifact.payload)


def execute(
    graph: ComputeGraph,
    workspace: Workspace,
    budget: Budget | None = None,
    token: ContinuationToken | None = None,
    registry: PerceptorRegistry | None = None,
    now: TimeStamp = 0,
) -> ExecutionReport:
    budget = budget or Budget()
    if budget.max_nodes is not None and len(graph.nodes) > budget.max_nodes:
        raise SchemaError(
            f"graph has {len(graph.nodes)} nodes, budget allows {budget.max_nodes}"
        )
    if token is not None and token.graph_hash != graph.graph_hash:
        raise SchemaError("continuation token belongs to a different graph")

    for node_id in graph.topo_order:
        validate_layers(graph.nodes[node_id], workspace)

    done: dict[str, str] = dict(token.artifact_ids) if token else {}
    completed: list[str] = list(token.completed) if token else []
    payloads: dict[str, NodePayload] = {
        node_id: _load_payload(workspace, art_id) for node_id, art_id in done.items()
    }

    cost_spent = 0
    calls_spent = 0
    ran = 0
    halted = False

    for node_id in graph.topo_order:
        if node_id in done:
            continue
        node = graph.nodes[node_id]
        units, calls = node_cost(node, workspace)
        if budget.max_cost_units is not None and cost_spent + units > budget.max_cost_units:
            halted = True
            break
        if (
            budget.max_perceptor_calls is not None
            and calls_spent + calls > budget.max_perceptor_calls
        ):
            halted = True
            break
        inputs = [payloads[src] for src in node.inputs]
        payload = run_node(node, inputs, workspace, registry)
        payloads[node_id] = payload
        art_id = _materialize(
            graph, node_id, payload, workspace, [done[s] for s in node.inputs], now
        )
        done[node_id] = art_id
        completed.append(node_id)
        cost_spent += units
        calls_spent += calls
        ran += 1

    if halted:
        return ExecutionReport(
            status=ExecutionStatus.PARTIAL,
            completed=completed,
            produced_artifacts=[done[o] for o in graph.outputs if o in done],
            cost_units=cost_spent,
            perceptor_calls=calls_spent,
            nodes_run=ran,
            continuation=ContinuationToken(
                graph_hash=graph.graph_hash,
                completed=completed,
                artifact_ids=done,
            ),
        )
    return ExecutionReport(
        status=ExecutionStatus.COMPLETE,
        completed=completed,
        produced_artifacts=[done[o] for o in graph.outputs],
        cost_units=cost_spent,
        perceptor_calls=calls_spent,
        nodes_run=ran,
        continuation=None,
    )


def run_to_completion(
    graph: ComputeGraph,
    workspace: Workspace,
    budget: Budget | None = None,
    registry: PerceptorRegistry | None = None,
    now: TimeStamp = 0,
    max_rounds: int = 1000,
) -> tuple[ExecutionReport, int]:
    """Resume until Complete; returns (final report, rounds used)."""
    token = None
    for rounds in range(1, max_rounds + 1):
        report = execute(graph, workspace, budget, token, registry, now)
        if report.status == ExecutionStatus.COMPLETE:
            return report, rounds
        if report.nodes_run == 0:
            raise RuntimeOpError(
                report.continuation.completed[-1] if report.continuation.completed else "<start>",
                "budget cannot admit the next node; raise the per-call budget",
            )
        token = report.continuation
    raise RuntimeOpError("<resume>", f"graph did not complete in {max_rounds} rounds")
