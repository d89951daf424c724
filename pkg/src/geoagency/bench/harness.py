"""Run sessions, write logs, replay them, and audit the ledger.

The interaction log is a JSONL stream: one meta line, then edit events and
quality samples in command order. Replay re-applies edit lines to a fresh
committed-state machine and recomputes every quality sample and metric;
a correct engine reproduces the original MetricsReport exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from ..core.vector import LabelOrigin, LabelStatus
from ..embeddings import cell_index
from ..errors import SchemaError
from .evaluator import Evaluator, QualitySample
from .events import EditEvent, EventKind
from .metrics import (
    MetricsReport,
    ValidityFlags,
    compute_progress_auc,
    compute_rework_rate,
    compute_suggestion_bias,
    compute_time_to_threshold,
    decision_rates,
)
from .session import OTHER_LABEL, CapabilityLevel, Session, SessionSpec
from .simuser import SimUser, SimUserPolicy
from .worldgen import generate_world


@dataclass
class SessionResult:
    session_id: str
    spec: SessionSpec
    metrics: MetricsReport
    log_lines: list[dict]
    session: Session


def run_session(
    spec: SessionSpec, policy: SimUserPolicy, session_id: str | None = None
) -> SessionResult:
    session = Session(spec)
    SimUser(policy, spec.seed).run(session)
    metrics = session.metrics()
    return SessionResult(
        session_id=session_id or f"{spec.capability.value}-{spec.seed:03d}",
        spec=spec,
        metrics=metrics,
        log_lines=session.log_lines(),
        session=session,
    )


# -- replay ---------------------------------------------------------------------


def replay_log(log_lines: list[dict]) -> MetricsReport:
    """Recompute the MetricsReport from a log, trusting only edit lines.

    Quality values are recomputed against the regenerated world, never read
    from the log, so replay checks the engine end to end.
    """
    if not log_lines or log_lines[0].get("type") != "meta":
        raise SchemaError("log must start with a meta line")
    meta = log_lines[0]
    spec = SessionSpec.from_json(meta["spec"])
    _, reference = generate_world(spec.world, spec.seed)
    evaluator = Evaluator(reference, spec.task, spec.target_class)

    committed: dict[str, tuple[str, LabelOrigin]] = {}
    events: list[EditEvent] = []
    samples: list[QualitySample] = []

    for line in log_lines[1:]:
        kind = line.get("type")
        if kind == "edit":
            event = EditEvent.from_json(line)
            events.append(event)
            if event.kind in (EventKind.CREATE, EventKind.OVERWRITE):
                committed[event.target] = (event.label, event.origin)
            elif event.kind == EventKind.COMMIT:
                committed[event.target] = (event.label, event.origin)
            elif event.kind == EventKind.DELETE:
                committed.pop(event.target, None)
        elif kind == "quality":
            state = {k: v[0] for k, v in committed.items()}
            samples.append(evaluator.sample(state, line["t"]))
        else:
            raise SchemaError(f"unknown log line type {kind!r}")

    truth = reference.read_labels("evaluator")
    truth_t2 = reference.read_labels_t2("evaluator")
    names = reference.class_names
    triples = []
    for item_id, (label, origin) in committed.items():
        idx = cell_index(item_id)
        if spec.target_class == "changed" and truth_t2 is not None:
            true_label = "changed" if truth[idx] != truth_t2[idx] else OTHER_LABEL
        elif spec.task.value == "binary_classify":
            true_name = names[int(truth[idx])]
            true_label = spec.target_class if true_name == spec.target_class else OTHER_LABEL
        else:
            true_label = names[int(truth[idx])]
        triples.append((label, true_label, origin))

    accept_rate, reject_rate = decision_rates(events)
    return MetricsReport(
        time_to_threshold=compute_time_to_threshold(samples, spec.tau),
        progress_auc=compute_progress_auc(samples, spec.t_max),
        rework_rate=compute_rework_rate(events),
        suggestion_bias=compute_suggestion_bias(triples),
        accept_rate=accept_rate,
        reject_rate=reject_rate,
        compute_cost=meta.get("compute_cost", 0),
        validity=ValidityFlags(
            geometry_valid=True,
            crs_consistent=True,
            schema_valid=all(label for label, _ in committed.values()),
        ),
    )


# -- ledger audit ------------------------------------------------------------------


def audit_suggestion_safety(result_or_session) -> list[str]:
    """Zero-tolerance audit: committed agent-origin work needs accept->commit.

    Returns human-readable violations (empty list = clean).
    """
    session = getattr(result_or_session, "session", result_or_session)
    events = list(session.ledger.events)
    accepted: set[str] = set()
    created: set[str] = set()
    violations: list[str] = []
    for event in events:
        if event.kind == EventKind.ACCEPT:
            accepted.add(event.target)
        elif event.kind in (EventKind.CREATE, EventKind.OVERWRITE):
            created.add(event.target)
        elif event.kind == EventKind.COMMIT and event.target not in accepted:
            violations.append(f"commit of {event.target} without a prior accept")
    for feature in session.work.features:
        if feature.status != LabelStatus.COMMITTED:
            continue
        if feature.label_origin == LabelOrigin.MANUAL:
            if feature.id not in created:
                violations.append(f"manual commit {feature.id} has no create/overwrite event")
        elif feature.id not in accepted:
            violations.append(
                f"{feature.label_origin.value} commit {feature.id} was never accepted"
            )
    return violations


# -- benchmark matrix -----------------------------------------------------------------


@dataclass
class BenchConfig:
    capabilities: list[CapabilityLevel]
    seeds: list[int]
    base_spec: SessionSpec
    policy: SimUserPolicy

    @classmethod
    def from_json(cls, obj: dict) -> "BenchConfig":
        base = SessionSpec.from_json(obj.get("session", {}))
        return cls(
            capabilities=[CapabilityLevel(c) for c in obj.get(
                "capabilities",
                ["baseline", "plus_propagation", "plus_scaling", "plus_agent"],
            )],
            seeds=list(obj.get("seeds", [0])),
            base_spec=base,
            policy=SimUserPolicy.from_json(obj.get("policy", {})),
        )

    def session_specs(self) -> list[tuple[str, SessionSpec]]:
        from dataclasses import replace

        out = []
        for capability in self.capabilities:
            for seed in self.seeds:
                spec = replace(self.base_spec, capability=capability, seed=seed)
                out.append((f"{capability.value}-{seed:03d}", spec))
        return out


SUMMARY_COLUMNS = [
    "session_id", "capability", "T_tau", "auc", "rework", "bias", "accept_rate", "cost",
]


def summary_row(result: SessionResult) -> dict:
    m = result.metrics
    return {
        "session_id": result.session_id,
        "capability": result.spec.capability.value,
        "T_tau": "" if m.time_to_threshold is None else m.time_to_threshold,
        "auc": f"{m.progress_auc:.6f}",
        "rework": f"{m.rework_rate:.6f}",
        "bias": "" if m.suggestion_bias is None else f"{m.suggestion_bias:.6f}",
        "accept_rate": f"{m.accept_rate:.6f}",
        "cost": m.compute_cost,
    }


def run_bench(config: BenchConfig, out_dir: Path | None = None, jobs: int = 1) -> list[SessionResult]:
    pairs = config.session_specs()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_run_one, [(sid, spec, config.policy) for sid, spec in pairs])
            )
    else:
        results = [_run_one((sid, spec, config.policy)) for sid, spec in pairs]

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for result in results:
            session_dir = out_dir / result.session_id
            session_dir.mkdir(parents=True, exist_ok=True)
            with open(session_dir / "metrics.json", "w", encoding="utf-8") as f:
                json.dump(result.metrics.to_json(), f, indent=2)
            with open(session_dir / "log.jsonl", "w", encoding="utf-8") as f:
                for line in result.log_lines:
                    f.write(json.dumps(line))
                    f.write("\n")
        write_summary_csv(results, out_dir / "summary.csv")
    return results


def _run_one(args) -> SessionResult:
    session_id, spec, policy = args
    return run_session(spec, policy, session_id)


def write_summary_csv(results: list[SessionResult], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for result in results:
            writer.writerow(summary_row(result))
