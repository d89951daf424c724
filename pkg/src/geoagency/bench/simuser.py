"""Deterministic simulated users.

A sim user stands in for the human in a work session: it labels with a
noisy belief about each cell's true class (hash-seeded, call-order
independent), reviews suggestions by comparing them to that belief, and
stops at a coverage target or when the time budget runs out. Rates are
simulated seconds per action, so benchmarks run at machine speed while
time metrics stay meaningful.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..core.vector import LabelStatus
from ..embeddings import cell_id, cell_index
from ..errors import EmptyPool
from ..navigation import QueryKind
from .session import OTHER_LABEL, CapabilityLevel, Session
from .evaluator import TaskKind


@dataclass(frozen=True)
class SimUserPolicy:
    labels_per_minute: float = 12.0
    reviews_per_minute: float = 30.0
    batch_reviews_per_minute: float = 300.0
    manual_error_rate: float = 0.05
    coverage_target: float = 0.9
    seed_labels: int = 12
    propagation_batch: int = 30
    # Confidence floor for bulk-reviewing the model surface. The default
    # learner's softmax over centroid distances tops out well below 1.0 on
    # noisy worlds, so "confident" starts just above the decision boundary.
    surface_threshold: float = 0.62
    surface_batch: int = 300
    uncertain_fixes_per_round: int = 5

    def to_json(self) -> dict:
        return {
            "labels_per_minute": self.labels_per_minute,
            "reviews_per_minute": self.reviews_per_minute,
            "batch_reviews_per_minute": self.batch_reviews_per_minute,
            "manual_error_rate": self.manual_error_rate,
            "coverage_target": self.coverage_target,
            "seed_labels": self.seed_labels,
            "propagation_batch": self.propagation_batch,
            "surface_threshold": self.surface_threshold,
            "surface_batch": self.surface_batch,
            "uncertain_fixes_per_round": self.uncertain_fixes_per_round,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimUserPolicy":
        return cls(**obj)


def _unit_hash(*parts) -> float:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little") / 2.0**64


def noisy_belief(
    reference,
    task: TaskKind,
    target_class: str,
    error_rate: float,
    seed: int,
    item_id: str,
) -> str:
    """The simulated human's read of a cell, stable under call order.

    Models human perception of the imagery: usually right, wrong at
    error_rate, decided by a hash of (seed, cell) so replays agree.
    """
    idx = cell_index(item_id)
    if target_class == "changed":
        changed = reference.cell_changed("simuser", idx)
        true_label = "changed" if changed else OTHER_LABEL
        wrong = OTHER_LABEL if changed else "changed"
    else:
        true_name = reference.cell_class_name("simuser", idx)
        if task == TaskKind.BINARY_CLASSIFY:
            true_label = target_class if true_name == target_class else OTHER_LABEL
            wrong = OTHER_LABEL if true_label == target_class else target_class
        else:
            true_label = true_name
            others = [c for c in reference.class_names if c != true_name]
            wrong = others[int(_unit_hash(seed, item_id, "pick") * len(others))]
    if _unit_hash(seed, item_id, "err") < error_rate:
        return wrong
    return true_label


class SimUser:
    def __init__(self, policy: SimUserPolicy, seed: int):
        self.policy = policy
        self.seed = seed
        self.declared_done = False
        self._idle_rounds = 0

    def belief(self, session: Session, item_id: str) -> str:
        return noisy_belief(
            session.reference,
            session.spec.task,
            session.spec.target_class,
            self.policy.manual_error_rate,
            self.seed,
            item_id,
        )

    # -- costs -------------------------------------------------------------------

    @property
    def manual_cost(self) -> int:
        return max(1, round(60.0 / self.policy.labels_per_minute))

    @property
    def review_cost(self) -> int:
        return max(1, round(60.0 / self.policy.reviews_per_minute))

    def batch_cost(self, n: int) -> int:
        return max(1, round(n * 60.0 / self.policy.batch_reviews_per_minute))

    # -- shared helpers ------------------------------------------------------------

    def _visit_order(self, session: Session) -> list[str]:
        rng = np.random.default_rng(self.seed + 1_000_003)
        order = rng.permutation(session.grid.n_cells)
        return [cell_id(int(i)) for i in order]

    def _coverage(self, session: Session) -> float:
        n = session.grid.n_cells
        handled = sum(
            1
            for f in session.work.features
            if f.status in (LabelStatus.COMMITTED, LabelStatus.REJECTED)
        )
        return handled / n

    def _time_left(self, session: Session) -> int:
        return session.spec.t_max - session.now

    def _next_unlabeled(self, session: Session, order: list[str]) -> str | None:
        taken = session.unavailable_ids()
        for item_id in order:
            if item_id not in taken:
                return item_id
        return None

    def _review_queue_once(self, session: Session, batch: bool) -> int:
        """Review every queued suggestion; returns number reviewed."""
        queue = list(session.suggestion_queue)
        if not queue:
            return 0
        if batch:
            decisions = [(i, self.belief(session, i) == session.work.get(i).label) for i in queue]
            cost = self.batch_cost(len(queue))
            if self._time_left(session) < cost:
                self.declared_done = True
                return 0
            session.decide_batch(decisions, duration=cost)
            return len(queue)
        reviewed = 0
        for item_id in queue:
            if self._time_left(session) < self.review_cost:
                self.declared_done = True
                break
            accept = self.belief(session, item_id) == session.work.get(item_id).label
            session.decide(item_id, accept, duration=self.review_cost)
            reviewed += 1
        return reviewed

    def _manual_label(self, session: Session, order: list[str]) -> bool:
        if self._time_left(session) < self.manual_cost:
            self.declared_done = True
            return False
        item_id = self._next_unlabeled(session, order)
        if item_id is None:
            self.declared_done = True
            return False
        session.manual_create(item_id, self.belief(session, item_id), duration=self.manual_cost)
        return True

    def _seed_phase_done(self, session: Session) -> bool:
        target = session.spec.target_class
        positives = sum(
            1
            for f in session.work.features
            if f.status == LabelStatus.COMMITTED and f.label == target
        )
        others = sum(
            1
            for f in session.work.features
            if f.status == LabelStatus.COMMITTED and f.label != target
        )
        half = max(1, self.policy.seed_labels // 2)
        return positives >= half and others >= half

    # -- capability flows ------------------------------------------------------------

    def run(self, session: Session) -> None:
        order = self._visit_order(session)
        flows = {
            CapabilityLevel.BASELINE: self._step_baseline,
            CapabilityLevel.PLUS_PROPAGATION: self._step_propagation,
            CapabilityLevel.PLUS_SCALING: self._step_scaling,
            CapabilityLevel.PLUS_AGENT: self._step_agent,
        }
        step = flows[session.spec.capability]
        while not self.declared_done:
            if self._coverage(session) >= self.policy.coverage_target:
                break
            if self._time_left(session) <= 0:
                break
            before = (session.now, len(session.ledger))
            step(session, order)
            if (session.now, len(session.ledger)) == before:
                self._idle_rounds += 1
                if self._idle_rounds >= 3:
                    break
            else:
                self._idle_rounds = 0
        session.finish()

    def _step_baseline(self, session: Session, order: list[str]) -> None:
        self._manual_label(session, order)

    def _step_propagation(self, session: Session, order: list[str]) -> None:
        if session.suggestion_queue:
            self._review_queue_once(session, batch=False)
            return
        if not self._seed_phase_done(session):
            self._manual_label(session, order)
            return
        try:
            candidates = session.propagate_suggest(
                self.policy.propagation_batch, duration=1
            )
        except EmptyPool:
            self.declared_done = True
            return
        if not candidates:
            self._manual_label(session, order)

    def _scaling_round(self, session: Session, order: list[str]) -> None:
        if session.suggestion_queue:
            self._review_queue_once(session, batch=True)
            return
        if not self._seed_phase_done(session):
            self._manual_label(session, order)
            return
        _, review = session.dual_step(
            duration=2, review_budget=self.policy.uncertain_fixes_per_round
        )
        for item_id in review:
            if self._time_left(session) < self.manual_cost:
                self.declared_done = True
                return
            session.manual_create(item_id, self.belief(session, item_id), duration=self.manual_cost)
        suggested = session.suggest_from_surface(
            threshold=self.policy.surface_threshold,
            limit=self.policy.surface_batch,
            duration=1,
        )
        if not suggested and not session.suggestion_queue:
            # Model is confident nowhere new; finish the residue manually.
            if not self._manual_label(session, order):
                self.declared_done = True

    def _step_scaling(self, session: Session, order: list[str]) -> None:
        self._scaling_round(session, order)

    def _step_agent(self, session: Session, order: list[str]) -> None:
        # Agent level: perceptor proposes the seed labels; then scale.
        if not self._seed_phase_done(session) and not session.suggestion_queue:
            bundle = session.navigate(
                QueryKind.EXPLORE, patch_budget=max(4, self.policy.seed_labels)
            )
            ids = [p.cell_ids[0] for p in bundle.patches]
            fresh = [i for i in ids if session.work.get(i) is None]
            if fresh:
                results = session.perceive_cells(fresh, "seed labels", duration=2)
                session.suggest_from_perception(fresh, results, duration=0)
            if not session.suggestion_queue:
                self._manual_label(session, order)
            return
        self._scaling_round(session, order)
