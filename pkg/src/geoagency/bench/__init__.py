from .evaluator import (
    ALLOWED_ACCESSORS,
    Evaluator,
    QualitySample,
    ReferenceAccessDenied,
    SealedReference,
    TaskKind,
    f1_score,
    iou_score,
)
from .events import EDIT_KINDS, EditEvent, EventKind, Ledger
from .harness import (
    BenchConfig,
    SessionResult,
    audit_suggestion_safety,
    replay_log,
    run_bench,
    run_session,
    summary_row,
    write_summary_csv,
)
from .metrics import (
    MetricsReport,
    ValidityFlags,
    compute_progress_auc,
    compute_rework_rate,
    compute_suggestion_bias,
    compute_time_to_threshold,
    decision_rates,
)
from .session import OTHER_LABEL, WORK_LAYER, CapabilityLevel, Session, SessionSpec
from .simuser import SimUser, SimUserPolicy
from .worldgen import (
    BUILDINGS_LAYER,
    CROPLAND_LAYER,
    Phenology,
    WorldSpec,
    generate_world,
    phenology_for_class,
    world_digest,
)

__all__ = [
    "ALLOWED_ACCESSORS", "Evaluator", "QualitySample", "ReferenceAccessDenied",
    "SealedReference", "TaskKind", "f1_score", "iou_score",
    "EDIT_KINDS", "EditEvent", "EventKind", "Ledger",
    "BenchConfig", "SessionResult", "audit_suggestion_safety", "replay_log",
    "run_bench", "run_session", "summary_row", "write_summary_csv",
    "MetricsReport", "ValidityFlags", "compute_progress_auc", "compute_rework_rate",
    "compute_suggestion_bias", "compute_time_to_threshold", "decision_rates",
    "OTHER_LABEL", "WORK_LAYER", "CapabilityLevel", "Session", "SessionSpec",
    "SimUser", "SimUserPolicy",
    "BUILDINGS_LAYER", "CROPLAND_LAYER", "Phenology", "WorldSpec", "generate_world",
    "phenology_for_class", "world_digest",
]
