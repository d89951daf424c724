"""Session client abstraction.

Scenario scripts run against this interface so the same action list can
drive an in-process session or a remote one over HTTP (see
service.client.HttpSessionClient). Methods mirror session commands and
return JSON-safe values.
"""

from __future__ import annotations

from ..attribution import AttributionRequest
from ..core.vector import LabelStatus
from ..navigation import QueryKind
from ..perception import TaskKind as PerceptionTask
from .session import Session, SessionSpec


class SessionClient:
    """Interface; see InProcessClient for the reference behavior."""

    spec: SessionSpec

    def now(self) -> int: raise NotImplementedError
    def queue(self) -> list[dict]: raise NotImplementedError
    def manual_create(self, item_id, label, duration=0) -> None: raise NotImplementedError
    def decide_batch(self, decisions, duration=0) -> None: raise NotImplementedError
    def propagate(self, k, duration=0) -> list[str]: raise NotImplementedError
    def dual_step(self, duration=0, review_budget=10) -> tuple[str, list[str]]: raise NotImplementedError
    def suggest_surface(self, threshold, limit, duration=0) -> list[str]: raise NotImplementedError
    def run_graph(self, spec, duration=0) -> dict: raise NotImplementedError
    def navigate(self, query_kind, patch_budget, params=None) -> dict: raise NotImplementedError
    def perceive(self, item_ids, question, task="caption", duration=0) -> list[dict]: raise NotImplementedError
    def suggest_from_perception(self, item_ids, results, duration=0) -> list[str]: raise NotImplementedError
    def attach(self, request: dict, duration=0) -> None: raise NotImplementedError
    def summarize_memory(self, duration=0) -> str: raise NotImplementedError
    def aggregate_buildings(self, threshold, duration=0) -> str: raise NotImplementedError
    def committed_labels(self) -> dict[str, str]: raise NotImplementedError
    def vector_feature_ids(self, layer: str) -> list[str]: raise NotImplementedError
    def committed_feature_ids(self, layer: str = "work") -> list[str]: raise NotImplementedError
    def finish(self) -> None: raise NotImplementedError
    def metrics(self) -> dict: raise NotImplementedError
    def log_lines(self) -> list[dict]: raise NotImplementedError


def attribution_request_from_json(obj: dict) -> AttributionRequest:
    return AttributionRequest(
        feature_id=obj["feature_id"],
        shape_metrics=bool(obj.get("shape_metrics", False)),
        zonal=tuple(tuple(z) for z in obj.get("zonal", [])),
        series=tuple(tuple(s) for s in obj.get("series", [])),
        external=tuple(obj.get("external", [])),
    )


class InProcessClient(SessionClient):
    def __init__(self, session: Session):
        self.session = session
        self.spec = session.spec

    def now(self) -> int:
        return self.session.now

    def queue(self) -> list[dict]:
        out = []
        for item_id in self.session.suggestion_queue:
            meta = self.session.suggestion_meta.get(item_id, {})
            out.append({"item_id": item_id, **meta})
        return out

    def manual_create(self, item_id, label, duration=0) -> None:
        self.session.manual_create(item_id, label, duration=duration)

    def decide_batch(self, decisions, duration=0) -> None:
        self.session.decide_batch(
            [(d["item_id"], bool(d["accept"])) for d in decisions], duration=duration
        )

    def propagate(self, k, duration=0) -> list[str]:
        return [c.item_id for c in self.session.propagate_suggest(k, duration=duration)]

    def dual_step(self, duration=0, review_budget=10):
        return self.session.dual_step(duration=duration, review_budget=review_budget)

    def suggest_surface(self, threshold, limit, duration=0) -> list[str]:
        return self.session.suggest_from_surface(
            threshold=threshold, limit=limit, duration=duration
        )

    def run_graph(self, spec, duration=0) -> dict:
        return self.session.run_graph(spec, duration=duration).to_json()

    def navigate(self, query_kind, patch_budget, params=None) -> dict:
        return self.session.navigate(QueryKind(query_kind), patch_budget, params).to_json()

    def perceive(self, item_ids, question, task="caption", duration=0) -> list[dict]:
        results = self.session.perceive_cells(
            item_ids, question, task=PerceptionTask(task), duration=duration
        )
        return [r.to_json() for r in results]

    def suggest_from_perception(self, item_ids, results, duration=0) -> list[str]:
        from ..perception import PerceptionResult

        parsed = [
            PerceptionResult(
                answerable=r["answerable"],
                confidence=r["confidence"],
                note=r["note"],
                label=r.get("label"),
            )
            for r in results
        ]
        return self.session.suggest_from_perception(item_ids, parsed, duration=duration)

    def attach(self, request: dict, duration=0) -> None:
        self.session.attach(attribution_request_from_json(request), duration=duration)

    def summarize_memory(self, duration=0) -> str:
        return self.session.summarize_memory(duration=duration)

    def aggregate_buildings(self, threshold, duration=0) -> str:
        return self.session.aggregate_buildings(threshold=threshold, duration=duration)

    def committed_labels(self) -> dict[str, str]:
        return self.session.committed_labels()

    def vector_feature_ids(self, layer: str) -> list[str]:
        if layer not in self.session.workspace.vectors:
            return []
        return [f.id for f in self.session.workspace.vectors[layer].features]

    def committed_feature_ids(self, layer: str = "work") -> list[str]:
        if layer not in self.session.workspace.vectors:
            return []
        return [
            f.id
            for f in self.session.workspace.vectors[layer].features
            if f.status == LabelStatus.COMMITTED
        ]

    def finish(self) -> None:
        self.session.finish()

    def metrics(self) -> dict:
        return self.session.metrics().to_json()

    def log_lines(self) -> list[dict]:
        return self.session.log_lines()
