from .executor import (
    Budget,
    ContinuationToken,
    ExecutionReport,
    ExecutionStatus,
    execute,
    run_to_completion,
)
from .model import ComputeGraph, GraphNode, OpKind, build_graph
from .ops import node_cost, op_mask_apply, op_ndvi, op_threshold

__all__ = [
    "Budget", "ContinuationToken", "ExecutionReport", "ExecutionStatus",
    "execute", "run_to_completion",
    "ComputeGraph", "GraphNode", "OpKind", "build_graph",
    "node_cost", "op_mask_apply", "op_ndvi", "op_threshold",
]
