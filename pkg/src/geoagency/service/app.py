"""HTTP/JSON boundary: sessions, layers, suggestion queues, graphs, memory,
dual modeling, and live metrics under /v1.

One actor per session; requests that mutate a session serialize on that
session's lock. Reference labels never cross this boundary: live metrics
expose the evaluator's Q(t) values only.
"""

from __future__ import annotations

import base64
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..attribution import AttributionRequest
from ..bench.session import Session, SessionSpec
from ..core.geometry import BBox, TimeWindow
from ..core.raster import GridRaster, write_gridr
from ..core.vector import layer_to_geojson, polygon_from_geojson
from ..errors import (
    AgencyError,
    CapabilityDenied,
    NotFound,
    StaleCandidate,
    ValidationError,
)
from ..graphs import Budget, ContinuationToken, build_graph
from ..memory import CurateAction
from ..navigation import QueryKind
from ..perception import PerceptionResult, TaskKind as PerceptionTask
from . import schemas

MAX_TILE_SIDE = 256


@dataclass
class SessionRuntime:
    session: Session
    actor: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    graphs: dict = field(default_factory=dict)


class ServiceState:
    def __init__(self):
        self.sessions: dict[str, SessionRuntime] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def create(self, spec: SessionSpec, actor: str) -> str:
        with self._lock:
            self._counter += 1
            session_id = f"s{self._counter:04d}"
            self.sessions[session_id] = SessionRuntime(session=Session(spec), actor=actor)
            return session_id

    def get(self, session_id: str) -> SessionRuntime:
        runtime = self.sessions.get(session_id)
        if runtime is None:
            raise NotFound(f"no session {session_id!r}")
        return runtime


def _state_response(session_id: str, runtime: SessionRuntime) -> schemas.SessionStateResponse:
    session = runtime.session
    return schemas.SessionStateResponse(
        session_id=session_id,
        capability=session.spec.capability.value,
        now=session.now,
        t_max=session.spec.t_max,
        done=session.done,
        committed=len(session.committed_labels()),
        suggestions_open=len(session.suggestion_queue),
        compute_cost=session.compute_cost,
        actor=runtime.actor,
    )


def _downsample(raster: GridRaster, max_side: int) -> tuple[GridRaster, GridRaster]:
    stride = max(1, -(-max(raster.width, raster.height) // max_side))
    if stride == 1:
        return raster, raster
    cols = range(0, raster.width, stride)
    rows = range(0, raster.height, stride)
    idx = [r * raster.width + c for r in rows for c in cols]
    bands = {name: values[idx] for name, values in raster.bands.items()}
    small = GridRaster(
        origin=raster.origin,
        cell_size=raster.cell_size * stride,
        width=len(cols),
        height=len(rows),
        bands=bands,
        nodata=raster.nodata,
        timestamp=raster.timestamp,
    )
    return small, raster


def create_app(ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="geoagency service", version=__version__)
    state = ServiceState()
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def _schema_error(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "SchemaError", "detail": str(exc.errors())}
        )

    @app.exception_handler(AgencyError)
    async def _agency_error(request, exc: AgencyError):
        if isinstance(exc, CapabilityDenied):
            status = 403
        elif isinstance(exc, StaleCandidate):
            status = 409
        elif isinstance(exc, NotFound):
            status = 404
        elif isinstance(exc, ValidationError):
            status = 400
        else:
            status = 400
        return JSONResponse(
            status_code=status, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    # -- sessions ---------------------------------------------------------------

    @app.post("/v1/sessions")
    def create_session(req: schemas.CreateSessionRequest):
        spec = SessionSpec.from_json(req.spec)
        session_id = state.create(spec, req.actor)
        return {"session_id": session_id}

    @app.get("/v1/sessions/{session_id}/state", response_model=schemas.SessionStateResponse)
    def session_state(session_id: str):
        return _state_response(session_id, state.get(session_id))

    @app.post("/v1/sessions/{session_id}/done")
    def finish_session(session_id: str):
        runtime = state.get(session_id)
        with runtime.lock:
            runtime.session.finish()
            return runtime.session.metrics().to_json()

    @app.get("/v1/sessions/{session_id}/log")
    def session_log(session_id: str):
        runtime = state.get(session_id)
        with runtime.lock:
            return {"lines": runtime.session.log_lines()}

    # -- layers --------------------------------------------------------------------

    @app.get("/v1/sessions/{session_id}/layers")
    def list_layers(session_id: str):
        session = state.get(session_id).session
        return {
            "rasters": sorted(session.workspace.rasters),
            "vectors": sorted(session.workspace.vectors),
        }

    @app.get("/v1/sessions/{session_id}/layers/{name}")
    def get_layer(session_id: str, name: str):
        session = state.get(session_id).session
        if name in session.workspace.vectors:
            return layer_to_geojson(session.workspace.vectors[name])
        if name in session.workspace.rasters:
            import os
            import tempfile

            small, full = _downsample(session.workspace.rasters[name], MAX_TILE_SIDE)
            with tempfile.NamedTemporaryFile(delete=False) as tmp:
                path = tmp.name
            try:
                write_gridr(small, path)
                with open(path, "rb") as f:
                    payload = f.read()
            finally:
                os.unlink(path)
            return schemas.RasterTileResponse(
                name=name,
                encoding="gridr-base64",
                width=small.width,
                height=small.height,
                full_width=full.width,
                full_height=full.height,
                data=base64.b64encode(payload).decode("ascii"),
            )
        raise NotFound(f"no layer {name!r}")

    @app.get("/v1/sessions/{session_id}/artifacts")
    def list_artifacts(session_id: str):
        session = state.get(session_id).session
        return {"artifacts": [a.to_json() for a in session.workspace.artifacts.values()]}

    # -- suggestions -------------------------------------------------------------------

    @app.get("/v1/sessions/{session_id}/suggestions", response_model=schemas.SuggestionsResponse)
    def suggestions(session_id: str, cursor: int = Query(default=0, ge=0), limit: int = 100):
        session = state.get(session_id).session
        queue = session.suggestion_queue
        window = queue[cursor : cursor + limit]
        entries = []
        for item_id in window:
            meta = session.suggestion_meta.get(item_id, {})
            entries.append(
                schemas.SuggestionEntry(
                    item_id=item_id,
                    label=meta.get("label"),
                    origin=meta.get("origin"),
                    score=meta.get("score"),
                )
            )
        return schemas.SuggestionsResponse(
            cursor=cursor + len(window), total_open=len(queue), suggestions=entries
        )

    @app.post("/v1/sessions/{session_id}/suggestions/decide")
    def decide(session_id: str, req: schemas.DecideRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            runtime.session.decide_batch(
                [(d.item_id, d.accept) for d in req.decisions],
                duration=req.duration,
                commit=req.commit,
            )
            return _state_response(session_id, runtime)

    @app.post("/v1/sessions/{session_id}/features")
    def write_feature(session_id: str, req: schemas.FeatureWriteRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            feature = runtime.session.manual_create(req.item_id, req.label, duration=req.duration)
            return {"item_id": feature.id, "status": feature.status.value}

    @app.post("/v1/sessions/{session_id}/features/delete")
    def delete_feature(session_id: str, req: schemas.FeatureDeleteRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            runtime.session.delete_feature(req.item_id, duration=req.duration)
            return {"deleted": req.item_id}

    @app.post("/v1/sessions/{session_id}/features/{feature_id}/attributes")
    def attach_attributes(session_id: str, feature_id: str, req: schemas.AttachAttributesRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            feature = runtime.session.attach(
                AttributionRequest(
                    feature_id=feature_id,
                    shape_metrics=req.shape_metrics,
                    zonal=tuple(tuple(z) for z in req.zonal),
                    series=tuple(tuple(s) for s in req.series),
                    external=tuple(req.external),
                ),
                duration=req.duration,
            )
            from ..core.attributes import encode_attribute

            return {
                "item_id": feature.id,
                "attributes": {k: encode_attribute(v) for k, v in feature.attributes.items()},
            }

    # -- propagation / dual modeling ------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/propagate")
    def propagate(session_id: str, req: schemas.PropagateRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            candidates = runtime.session.propagate_suggest(
                req.k, duration=req.duration, use_mask=req.use_mask, min_score=req.min_score
            )
            return {"candidates": [c.to_json() for c in candidates]}

    @app.post(
        "/v1/sessions/{session_id}/dual-loop/step", response_model=schemas.DualStepResponse
    )
    def dual_step(session_id: str, req: schemas.DualStepRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            artifact, review = runtime.session.dual_step(
                duration=req.duration, review_budget=req.review_budget, use_mask=req.use_mask
            )
            return schemas.DualStepResponse(
                surface_artifact=artifact,
                review_queue=review,
                iteration=runtime.session.loop_state.iteration,
            )

    @app.post("/v1/sessions/{session_id}/dual-loop/suggest")
    def dual_suggest(session_id: str, req: schemas.SurfaceSuggestRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            created = runtime.session.suggest_from_surface(
                threshold=req.threshold, limit=req.limit, duration=req.duration
            )
            return {"suggested": created}

    # -- graphs ------------------------------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/graphs", response_model=schemas.GraphCreateResponse)
    def create_graph(session_id: str, req: schemas.GraphCreateRequest):
        runtime = state.get(session_id)
        graph = build_graph(req.spec)
        runtime.graphs[graph.graph_hash] = graph
        return schemas.GraphCreateResponse(graph_hash=graph.graph_hash, nodes=len(graph.nodes))

    @app.post("/v1/sessions/{session_id}/graphs/{graph_hash}/run")
    def run_graph(session_id: str, graph_hash: str, req: schemas.GraphRunRequest):
        runtime = state.get(session_id)
        graph = runtime.graphs.get(graph_hash)
        if graph is None:
            raise NotFound(f"no graph {graph_hash!r}; POST it first")
        budget = None
        if req.budget is not None:
            budget = Budget(
                max_nodes=req.budget.max_nodes,
                max_cost_units=req.budget.max_cost_units,
                max_perceptor_calls=req.budget.max_perceptor_calls,
            )
        token = (
            ContinuationToken.from_json(req.continuation) if req.continuation else None
        )
        with runtime.lock:
            report = runtime.session.run_graph(
                graph, budget=budget, token=token, duration=req.duration
            )
            return report.to_json()

    # -- agent primitives -----------------------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/navigate")
    def navigate(session_id: str, req: schemas.NavigateRequest):
        runtime = state.get(session_id)
        bundle = runtime.session.navigate(
            QueryKind(req.query_kind), req.patch_budget, req.params
        )
        return bundle.to_json()

    @app.post("/v1/sessions/{session_id}/perceive")
    def perceive(session_id: str, req: schemas.PerceiveRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            results = runtime.session.perceive_cells(
                req.item_ids, req.question, task=PerceptionTask(req.task), duration=req.duration
            )
            return {"results": [r.to_json() for r in results]}

    @app.post("/v1/sessions/{session_id}/perceive/suggest")
    def perceive_suggest(session_id: str, req: schemas.PerceiveSuggestRequest):
        runtime = state.get(session_id)
        parsed = [
            PerceptionResult(
                answerable=r["answerable"],
                confidence=r["confidence"],
                note=r["note"],
                label=r.get("label"),
            )
            for r in req.results
        ]
        with runtime.lock:
            created = runtime.session.suggest_from_perception(
                req.item_ids, parsed, duration=req.duration
            )
            return {"suggested": created}

    # -- memory -----------------------------------------------------------------------------------

    @app.get("/v1/sessions/{session_id}/memory")
    def memory_query(
        session_id: str,
        bbox: str | None = None,
        time_from: int | None = Query(default=None, alias="from"),
        time_to: int | None = Query(default=None, alias="to"),
        kw: str | None = None,
        limit: int = 100,
    ):
        runtime = state.get(session_id)
        spatial = None
        if bbox is not None:
            parts = [float(x) for x in bbox.split(",")]
            if len(parts) != 4:
                raise ValidationError("bbox must be min_x,min_y,max_x,max_y")
            spatial = BBox(*parts)
        temporal = None
        if time_from is not None or time_to is not None:
            temporal = TimeWindow(
                time_from if time_from is not None else -(2**62),
                time_to if time_to is not None else 2**62,
            )
        entries = runtime.session.memory_retrieve(
            spatial=spatial, temporal=temporal, keyword=kw, limit=limit
        )
        return {"entries": [e.to_json() for e in entries]}

    @app.post("/v1/sessions/{session_id}/memory")
    def memory_write(session_id: str, req: schemas.MemoryWriteRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            entry_id = runtime.session.memory_write(
                polygon_from_geojson(req.geometry), req.query, req.notes, duration=req.duration
            )
            return {"entry_id": entry_id}

    @app.post("/v1/sessions/{session_id}/memory/{entry_id}/curate")
    def memory_curate(session_id: str, entry_id: str, req: schemas.MemoryCurateRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            entry = runtime.session.memory_curate(
                entry_id,
                CurateAction(req.action),
                notes=req.notes,
                geometry=polygon_from_geojson(req.geometry) if req.geometry else None,
            )
            return entry.to_json()

    # -- reports ------------------------------------------------------------------------------------

    @app.post("/v1/sessions/{session_id}/report")
    def summary_report(session_id: str, req: schemas.SummaryReportRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            artifact_id = runtime.session.summarize_memory(duration=req.duration)
            return {"artifact_id": artifact_id}

    @app.post("/v1/sessions/{session_id}/buildings/aggregate")
    def aggregate_buildings(session_id: str, req: schemas.AggregateBuildingsRequest):
        runtime = state.get(session_id)
        with runtime.lock:
            artifact_id = runtime.session.aggregate_buildings(
                threshold=req.threshold, duration=req.duration
            )
            return {"artifact_id": artifact_id}

    @app.get(
        "/v1/sessions/{session_id}/metrics/live", response_model=schemas.LiveMetricsResponse
    )
    def live_metrics(session_id: str):
        runtime = state.get(session_id)
        session = runtime.session
        return schemas.LiveMetricsResponse(
            samples=[schemas.QualityPoint(**s.to_json()) for s in session.samples],
            now=session.now,
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
