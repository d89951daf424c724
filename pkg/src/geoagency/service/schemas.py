"""Pydantic request/response models for the /v1 API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    spec: dict
    actor: str = Field(default="live", pattern="^(live|sim)$")


class SessionStateResponse(BaseModel):
    session_id: str
    capability: str
    now: int
    t_max: int
    done: bool
    committed: int
    suggestions_open: int
    compute_cost: int
    actor: str


class Decision(BaseModel):
    item_id: str
    accept: bool


class DecideRequest(BaseModel):
    decisions: list[Decision] = Field(min_length=1)
    duration: int = 0
    commit: bool = True


class FeatureWriteRequest(BaseModel):
    item_id: str
    label: str
    duration: int = 0


class FeatureDeleteRequest(BaseModel):
    item_id: str
    duration: int = 0


class PropagateRequest(BaseModel):
    k: int = Field(gt=0)
    duration: int = 0
    use_mask: bool = True
    min_score: float | None = None


class GraphCreateRequest(BaseModel):
    spec: dict


class GraphCreateResponse(BaseModel):
    graph_hash: str
    nodes: int


class BudgetModel(BaseModel):
    max_nodes: int | None = None
    max_cost_units: int | None = None
    max_perceptor_calls: int | None = None


class GraphRunRequest(BaseModel):
    budget: BudgetModel | None = None
    continuation: dict | None = None
    duration: int = 0


class DualStepRequest(BaseModel):
    duration: int = 0
    review_budget: int = 10
    use_mask: bool = True


class DualStepResponse(BaseModel):
    surface_artifact: str
    review_queue: list[str]
    iteration: int


class SurfaceSuggestRequest(BaseModel):
    threshold: float = 0.62
    limit: int | None = None
    duration: int = 0


class PerceiveRequest(BaseModel):
    item_ids: list[str] = Field(min_length=1)
    question: str
    task: str = "classify"
    duration: int = 0


class PerceiveSuggestRequest(BaseModel):
    item_ids: list[str]
    results: list[dict]
    duration: int = 0


class NavigateRequest(BaseModel):
    query_kind: str
    patch_budget: int = Field(gt=0)
    params: dict | None = None


class MemoryWriteRequest(BaseModel):
    geometry: dict  # GeoJSON polygon
    query: str
    notes: str = ""
    duration: int = 0


class MemoryCurateRequest(BaseModel):
    action: str = Field(pattern="^(delete|correct|confirm)$")
    notes: str | None = None
    geometry: dict | None = None


class AttachAttributesRequest(BaseModel):
    shape_metrics: bool = False
    zonal: list[list[str]] = Field(default_factory=list)
    series: list[list[str]] = Field(default_factory=list)
    external: list[str] = Field(default_factory=list)
    duration: int = 0


class AggregateBuildingsRequest(BaseModel):
    threshold: float = 0.5
    duration: int = 0


class SummaryReportRequest(BaseModel):
    duration: int = 0


class SuggestionEntry(BaseModel):
    item_id: str
    label: str | None = None
    origin: str | None = None
    score: float | None = None


class SuggestionsResponse(BaseModel):
    cursor: int
    total_open: int
    suggestions: list[SuggestionEntry]


class QualityPoint(BaseModel):
    t: int
    q: float
    metric: str


class LiveMetricsResponse(BaseModel):
    samples: list[QualityPoint]
    now: int


class RasterTileResponse(BaseModel):
    name: str
    encoding: str  # "gridr-base64"
    width: int
    height: int
    full_width: int
    full_height: int
    data: str
