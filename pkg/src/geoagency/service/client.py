"""HTTP session client: the SessionClient interface over the /v1 API.

Drives a remote session action-for-action like the in-process client, so
scenario scripts run identically over the wire. Belief simulation stays
client-side (the harness regenerates the world locally from the spec);
no reference data ever crosses the API.
"""

from __future__ import annotations

import httpx

from ..bench.actors import SessionClient
from ..bench.session import SessionSpec
from ..errors import AgencyError


class HttpSessionClient(SessionClient):
    def __init__(
        self,
        base_url: str | None,
        spec: SessionSpec,
        http: httpx.Client | None = None,
        actor: str = "sim",
    ):
        self.http = http or httpx.Client(base_url=base_url, timeout=60.0)
        self.spec = spec
        response = self._post("/v1/sessions", {"spec": spec.to_json(), "actor": actor})
        self.session_id = response["session_id"]

    def _raise_for(self, response: httpx.Response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json()
            except Exception:
                detail = {"detail": response.text}
            raise AgencyError(f"HTTP {response.status_code}: {detail.get('detail', detail)}")
        return response.json()

    def _post(self, path: str, payload: dict) -> dict:
        return self._raise_for(self.http.post(path, json=payload))

    def _get(self, path: str, params: dict | None = None) -> dict:
        return self._raise_for(self.http.get(path, params=params))

    def _spath(self, suffix: str) -> str:
        return f"/v1/sessions/{self.session_id}{suffix}"

    # -- SessionClient ------------------------------------------------------------

    def now(self) -> int:
        return self._get(self._spath("/state"))["now"]

    def queue(self) -> list[dict]:
        out = []
        cursor = 0
        while True:
            page = self._get(self._spath("/suggestions"), {"cursor": cursor, "limit": 200})
            out.extend(page["suggestions"])
            if page["cursor"] >= page["total_open"] or not page["suggestions"]:
                break
            cursor = page["cursor"]
        return out

    def manual_create(self, item_id, label, duration=0) -> None:
        self._post(self._spath("/features"), {"item_id": item_id, "label": label, "duration": duration})

    def decide_batch(self, decisions, duration=0) -> None:
        self._post(
            self._spath("/suggestions/decide"),
            {"decisions": decisions, "duration": duration, "commit": True},
        )

    def propagate(self, k, duration=0) -> list[str]:
        response = self._post(self._spath("/propagate"), {"k": k, "duration": duration})
        return [c["item_id"] for c in response["candidates"]]

    def dual_step(self, duration=0, review_budget=10):
        response = self._post(
            self._spath("/dual-loop/step"),
            {"duration": duration, "review_budget": review_budget},
        )
        return response["surface_artifact"], response["review_queue"]

    def suggest_surface(self, threshold, limit, duration=0) -> list[str]:
        response = self._post(
            self._spath("/dual-loop/suggest"),
            {"threshold": threshold, "limit": limit, "duration": duration},
        )
        return response["suggested"]

    def run_graph(self, spec, duration=0) -> dict:
        created = self._post(self._spath("/graphs"), {"spec": spec})
        return self._post(
            self._spath(f"/graphs/{created['graph_hash']}/run"), {"duration": duration}
        )

    def navigate(self, query_kind, patch_budget, params=None) -> dict:
        return self._post(
            self._spath("/navigate"),
            {"query_kind": query_kind, "patch_budget": patch_budget, "params": params},
        )

    def perceive(self, item_ids, question, task="classify", duration=0) -> list[dict]:
        response = self._post(
            self._spath("/perceive"),
            {"item_ids": item_ids, "question": question, "task": task, "duration": duration},
        )
        return response["results"]

    def suggest_from_perception(self, item_ids, results, duration=0) -> list[str]:
        response = self._post(
            self._spath("/perceive/suggest"),
            {"item_ids": item_ids, "results": results, "duration": duration},
        )
        return response["suggested"]

    def attach(self, request: dict, duration=0) -> None:
        feature_id = request["feature_id"]
        payload = {k: v for k, v in request.items() if k != "feature_id"}
        payload["duration"] = duration
        self._post(self._spath(f"/features/{feature_id}/attributes"), payload)

    def summarize_memory(self, duration=0) -> str:
        return self._post(self._spath("/report"), {"duration": duration})["artifact_id"]

    def aggregate_buildings(self, threshold, duration=0) -> str:
        return self._post(
            self._spath("/buildings/aggregate"), {"threshold": threshold, "duration": duration}
        )["artifact_id"]

    def committed_labels(self) -> dict[str, str]:
        layer = self._get(self._spath("/layers/work"))
        return {
            f["id"]: f["properties"]["agency"]["label"]
            for f in layer["features"]
            if f["properties"]["agency"]["status"] == "committed"
        }

    def vector_feature_ids(self, layer: str) -> list[str]:
        obj = self._get(self._spath(f"/layers/{layer}"))
        return [f["id"] for f in obj.get("features", [])]

    def committed_feature_ids(self, layer: str = "work") -> list[str]:
        obj = self._get(self._spath(f"/layers/{layer}"))
        return [
            f["id"]
            for f in obj.get("features", [])
            if f["properties"]["agency"]["status"] == "committed"
        ]

    def finish(self) -> None:
        self._metrics = self._post(self._spath("/done"), {})

    def metrics(self) -> dict:
        if getattr(self, "_metrics", None) is None:
            self.finish()
        return self._metrics

    def log_lines(self) -> list[dict]:
        return self._get(self._spath("/log"))["lines"]
