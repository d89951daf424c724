"""The four benchmark metrics plus auxiliary logs.

Time-to-threshold reads only sampled points (step-hold); progress AUC is
the trapezoidal integral with the last value held to T, normalized by T.
Suggestion bias is the total-variation distance between the error-category
histograms of suggestion-origin and manual-origin committed labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..core.geometry import TimeStamp
from ..core.vector import LabelOrigin, LabelStatus
from ..errors import EmptySamples
from .evaluator import QualitySample, samples_valid
from .events import EDIT_KINDS, EditEvent, EventKind

SUGGESTION_ORIGINS = frozenset(
    {LabelOrigin.PERCEPTOR, LabelOrigin.PROPAGATION, LabelOrigin.DUAL_MODEL}
)


def compute_time_to_threshold(samples: list[QualitySample], tau: float) -> TimeStamp | None:
    samples_valid(samples)
    for sample in samples:
        if sample.q >= tau:
            return sample.t
    return None


def compute_progress_auc(samples: list[QualitySample], t_max: TimeStamp) -> float:
    samples_valid(samples)
    if t_max <= 0:
        return samples[-1].q
    pts = [(s.t, s.q) for s in samples if s.t <= t_max]
    if not pts:
        # All samples beyond T: hold the first value across the window.
        return samples[0].q
    if pts[0][0] > 0:
        pts.insert(0, (0, pts[0][1]))
    if pts[-1][0] < t_max:
        pts.append((t_max, pts[-1][1]))
    area = 0.0
    for (t0, q0), (t1, q1) in zip(pts, pts[1:]):
        area += (t1 - t0) * (q0 + q1) / 2.0
    return area / t_max


def compute_rework_rate(events: list[EditEvent]) -> float:
    n_edits = sum(1 for e in events if e.kind in EDIT_KINDS)
    if n_edits == 0:
        return 0.0
    n_overwrite = sum(
        1
        for e in events
        if e.kind == EventKind.OVERWRITE
        or (e.kind == EventKind.DELETE and e.prior_status == LabelStatus.COMMITTED)
    )
    return n_overwrite / n_edits


def compute_suggestion_bias(
    committed: list[tuple[str, str, LabelOrigin]],
) -> float | None:
    """committed: (assigned label, true label, origin) per committed feature.

    Returns total variation between the two error-category distributions,
    or None when either side has no errors to compare.
    """
    sugg = Counter()
    manual = Counter()
    for assigned, true, origin in committed:
        if assigned == true:
            continue
        category = (assigned, true)
        if origin in SUGGESTION_ORIGINS:
            sugg[category] += 1
        elif origin == LabelOrigin.MANUAL:
            manual[category] += 1
    if not sugg or not manual:
        return None
    total_s = sum(sugg.values())
    total_m = sum(manual.values())
    keys = set(sugg) | set(manual)
    return 0.5 * sum(abs(sugg[k] / total_s - manual[k] / total_m) for k in keys)


@dataclass
class ValidityFlags:
    geometry_valid: bool = True
    crs_consistent: bool = True
    schema_valid: bool = True

    def to_json(self) -> dict:
        return {
            "geometry_valid": self.geometry_valid,
            "crs_consistent": self.crs_consistent,
            "schema_valid": self.schema_valid,
        }


@dataclass
class MetricsReport:
    time_to_threshold: TimeStamp | None
    progress_auc: float
    rework_rate: float
    suggestion_bias: float | None
    accept_rate: float
    reject_rate: float
    compute_cost: int
    validity: ValidityFlags = field(default_factory=ValidityFlags)

    def to_json(self) -> dict:
        return {
            "time_to_threshold": self.time_to_threshold,
            "progress_auc": self.progress_auc,
            "rework_rate": self.rework_rate,
            "suggestion_bias": self.suggestion_bias,
            "accept_rate": self.accept_rate,
            "reject_rate": self.reject_rate,
            "compute_cost": self.compute_cost,
            "validity": self.validity.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MetricsReport":
        v = obj.get("validity", {})
        return cls(
            time_to_threshold=obj["time_to_threshold"],
            progress_auc=obj["progress_auc"],
            rework_rate=obj["rework_rate"],
            suggestion_bias=obj["suggestion_bias"],
            accept_rate=obj["accept_rate"],
            reject_rate=obj["reject_rate"],
            compute_cost=obj["compute_cost"],
            validity=ValidityFlags(
                geometry_valid=v.get("geometry_valid", True),
                crs_consistent=v.get("crs_consistent", True),
                schema_valid=v.get("schema_valid", True),
            ),
        )


def decision_rates(events: list[EditEvent]) -> tuple[float, float]:
    accepts = sum(1 for e in events if e.kind == EventKind.ACCEPT)
    rejects = sum(1 for e in events if e.kind == EventKind.REJECT)
    decisions = accepts + rejects
    if decisions == 0:
        return 0.0, 0.0
    return accepts / decisions, rejects / decisions
