"""Session engine: one suggest-review-commit work stream over one world.

All mutations run through this object (single-writer command stream); the
background evaluator samples committed-label quality at fixed simulated
intervals. Capability levels gate which primitives a session may invoke.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..attribution import AttributionRequest, attach_attributes
from ..core.geometry import Polygon, TimeStamp, bbox_to_polygon
from ..core.raster import GridRaster
from ..core.vector import CRS_TAG, Feature, LabelOrigin, LabelStatus
from ..core.workspace import Workspace
from ..dual import CONFIDENCE_BAND, LoopState, fit_and_predict, surface_confident_cells
from ..core.artifacts import Artifact, ArtifactKind, ProvenanceRecord
from ..embeddings import EmbeddingIndex, SyntheticProvider, cell_id, cell_index
from ..errors import (
    CapabilityDenied,
    NotFound,
    SchemaError,
    SpecInvalid,
    StaleCandidate,
)
from ..graphs import Budget, ComputeGraph, build_graph, execute
from ..memory import Author, CurateAction, GeoMemory
from ..navigation import ContextBundle, PatchRef, QueryKind, build_context, sample_uncertainty
from ..perception import (
    CaptionPerceptor,
    MockOraclePerceptor,
    PerceptionQuery,
    PerceptionResult,
    PerceptorRegistry,
    TaskKind as PerceptionTask,
)
from ..propagation import Candidate, SeedSet, propagate
from .evaluator import Evaluator, QualitySample, SealedReference, TaskKind
from .events import EditEvent, EventKind, Ledger
from .worldgen import CROPLAND_LAYER, WorldSpec, generate_world

WORK_LAYER = "work"
OTHER_LABEL = "other"


class CapabilityLevel(str, enum.Enum):
    BASELINE = "baseline"
    PLUS_PROPAGATION = "plus_propagation"
    PLUS_SCALING = "plus_scaling"
    PLUS_AGENT = "plus_agent"


_RANK = {
    CapabilityLevel.BASELINE: 0,
    CapabilityLevel.PLUS_PROPAGATION: 1,
    CapabilityLevel.PLUS_SCALING: 2,
    CapabilityLevel.PLUS_AGENT: 3,
}


@dataclass(frozen=True)
class SessionSpec:
    task: TaskKind = TaskKind.BINARY_CLASSIFY
    target_class: str = "class0"
    tau: float = 0.8
    t_max: TimeStamp = 3600
    eval_interval: TimeStamp = 60
    capability: CapabilityLevel = CapabilityLevel.BASELINE
    seed: int = 0
    world: WorldSpec = field(default_factory=WorldSpec)
    perceptor_noise: float = 0.1
    max_perceptor_calls: int | None = None
    embeddings_layer: str = "embeddings"  # change tasks use "embeddings_delta"

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise SpecInvalid(f"tau must be in (0, 1], got {self.tau}")
        if self.t_max < 0:
            raise SpecInvalid(f"t_max must be >= 0, got {self.t_max}")
        if self.eval_interval <= 0:
            raise SpecInvalid(f"eval_interval must be > 0, got {self.eval_interval}")

    def to_json(self) -> dict:
        return {
            "task": self.task.value,
            "target_class": self.target_class,
            "tau": self.tau,
            "t_max": self.t_max,
            "eval_interval": self.eval_interval,
            "capability": self.capability.value,
            "seed": self.seed,
            "world": self.world.to_json(),
            "perceptor_noise": self.perceptor_noise,
            "max_perceptor_calls": self.max_perceptor_calls,
            "embeddings_layer": self.embeddings_layer,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SessionSpec":
        return cls(
            task=TaskKind(obj.get("task", "binary_classify")),
            target_class=obj.get("target_class", "class0"),
            tau=obj.get("tau", 0.8),
            t_max=obj.get("t_max", 3600),
            eval_interval=obj.get("eval_interval", 60),
            capability=CapabilityLevel(obj.get("capability", "baseline")),
            seed=obj.get("seed", 0),
            world=WorldSpec.from_json(obj.get("world", {})),
            perceptor_noise=obj.get("perceptor_noise", 0.1),
            max_perceptor_calls=obj.get("max_perceptor_calls"),
            embeddings_layer=obj.get("embeddings_layer", "embeddings"),
        )


class Session:
    def __init__(self, spec: SessionSpec):
        self.spec = spec
        self.workspace, self.reference = generate_world(spec.world, spec.seed)
        self.memory = GeoMemory(self.workspace.roi)
        self.ledger = Ledger()
        self.samples: list[QualitySample] = []
        self.now: TimeStamp = 0
        self.compute_cost = 0
        self.done = False
        self.loop_state = LoopState()
        self.suggestion_queue: list[str] = []
        self.suggestion_meta: dict[str, dict] = {}
        self._seq = 0
        self._log: list[tuple[TimeStamp, int, dict]] = []

        self.evaluator = Evaluator(self.reference, spec.task, spec.target_class)
        self._next_tick = spec.eval_interval
        self._emit_sample(0)

        truth = self.reference.read_labels("perceptor")
        names = self.reference.class_names
        self.registry = PerceptorRegistry(max_calls=spec.max_perceptor_calls)
        oracle = MockOraclePerceptor(truth, names, noise=spec.perceptor_noise, seed=spec.seed)
        self.registry.register(PerceptionTask.CLASSIFY, oracle)
        self.registry.register(PerceptionTask.CHANGE, oracle)
        self.registry.register(
            PerceptionTask.CAPTION,
            CaptionPerceptor(truth, names, noise=0.0, seed=spec.seed),
        )

        self.embedding_index = EmbeddingIndex(
            SyntheticProvider(self.workspace.rasters[spec.embeddings_layer]).embed_all()
        )

    # -- plumbing ---------------------------------------------------------------

    @property
    def work(self):
        return self.workspace.vectors[WORK_LAYER]

    @property
    def grid(self) -> GridRaster:
        return self.workspace.rasters["embeddings"]

    def _require(self, level: CapabilityLevel, op: str) -> None:
        if _RANK[self.spec.capability] < _RANK[level]:
            raise CapabilityDenied(
                f"{op} needs capability {level.value}, session is {self.spec.capability.value}"
            )

    def committed_labels(self) -> dict[str, str]:
        return {
            f.id: f.label
            for f in self.work.features
            if f.status == LabelStatus.COMMITTED and f.label
        }

    def _emit_sample(self, t: TimeStamp) -> None:
        sample = self.evaluator.sample(self.committed_labels(), t)
        self.samples.append(sample)
        self._push_log({"type": "quality", **sample.to_json()}, t)

    def _push_log(self, obj: dict, t: TimeStamp) -> None:
        self._log.append((t, self._seq, obj))
        self._seq += 1

    def _flush_due_ticks(self) -> None:
        while self._next_tick <= self.now and self._next_tick <= self.spec.t_max:
            self._emit_sample(self._next_tick)
            self._next_tick += self.spec.eval_interval

    def _advance(self, seconds: TimeStamp) -> None:
        if seconds < 0:
            raise SchemaError("durations must be >= 0")
        if self.done:
            raise SchemaError("session already finished")
        self._flush_due_ticks()
        target = self.now + seconds
        # Boundaries strictly before this command completes see the old state.
        while self._next_tick < target and self._next_tick <= self.spec.t_max:
            self._emit_sample(self._next_tick)
            self._next_tick += self.spec.eval_interval
        self.now = target

    def _record(self, event: EditEvent) -> None:
        self.ledger.append(event)
        self._push_log({"type": "edit", **event.to_json()}, event.t)

    def _cell_polygon(self, item_id: str) -> Polygon:
        return bbox_to_polygon(self.grid.cell_bbox(cell_index(item_id)))

    def labeled_ids(self) -> set[str]:
        return {
            f.id
            for f in self.work.features
            if f.status in (LabelStatus.COMMITTED, LabelStatus.ACCEPTED)
        }

    def unavailable_ids(self) -> set[str]:
        """Cells that must not be suggested again: any feature in the layer."""
        return {f.id for f in self.work.features}

    def pool_ids(self, use_mask: bool = True) -> list[str]:
        n = self.grid.n_cells
        if use_mask and CROPLAND_LAYER in self.workspace.rasters:
            keep = self.workspace.rasters[CROPLAND_LAYER].band("mask") == 1.0
            ids = [cell_id(i) for i in range(n) if keep[i]]
        else:
            ids = [cell_id(i) for i in range(n)]
        taken = self.unavailable_ids()
        return [i for i in ids if i not in taken]

    # -- manual edits (Baseline and up) ----------------------------------------

    def manual_create(self, item_id: str, label: str, duration: TimeStamp = 0) -> Feature:
        self._advance(duration)
        existing = self.work.get(item_id)
        if existing is not None:
            if existing.status == LabelStatus.COMMITTED:
                prior = existing.label
                existing.transition(LabelStatus.COMMITTED, label=label)
                existing.label_origin = LabelOrigin.MANUAL
                self._record(
                    EditEvent(
                        t=self.now,
                        kind=EventKind.OVERWRITE,
                        target=item_id,
                        origin=LabelOrigin.MANUAL,
                        label=label,
                        prior_label=prior,
                        prior_status=LabelStatus.COMMITTED,
                    )
                )
                return existing
            if existing.status == LabelStatus.SUGGESTED:
                self.decide(item_id, accept=False, duration=0)
            self.work.remove(item_id)
        feature = Feature(
            id=item_id,
            geometry=self._cell_polygon(item_id),
            label=label,
            label_origin=LabelOrigin.MANUAL,
            status=LabelStatus.COMMITTED,
        )
        self.work.add(feature)
        self._record(
            EditEvent(
                t=self.now,
                kind=EventKind.CREATE,
                target=item_id,
                origin=LabelOrigin.MANUAL,
                label=label,
            )
        )
        return feature

    def delete_feature(self, item_id: str, duration: TimeStamp = 0) -> None:
        self._advance(duration)
        feature = self.work.get(item_id)
        if feature is None:
            raise NotFound(f"no feature {item_id!r}")
        self.work.remove(item_id)
        if item_id in self.suggestion_queue:
            self.suggestion_queue.remove(item_id)
        self._record(
            EditEvent(
                t=self.now,
                kind=EventKind.DELETE,
                target=item_id,
                origin=feature.label_origin,
                prior_label=feature.label,
                prior_status=feature.status,
            )
        )

    # -- suggestion review -------------------------------------------------------

    def _suggest(
        self, item_id: str, label: str, origin: LabelOrigin, score: float | None = None
    ) -> Feature | None:
        if self.work.get(item_id) is not None:
            return None
        feature = Feature(
            id=item_id,
            geometry=self._cell_polygon(item_id),
            label=label,
            label_origin=origin,
            status=LabelStatus.SUGGESTED,
        )
        self.work.add(feature)
        self.suggestion_queue.append(item_id)
        self.suggestion_meta[item_id] = {
            "score": score,
            "origin": origin.value,
            "label": label,
        }
        return feature

    def decide(
        self,
        item_id: str,
        accept: bool,
        duration: TimeStamp = 0,
        commit: bool = True,
    ) -> Feature:
        self._advance(duration)
        feature = self.work.get(item_id)
        if feature is None:
            raise NotFound(f"no feature {item_id!r}")
        if feature.status != LabelStatus.SUGGESTED:
            raise StaleCandidate(
                f"feature {item_id!r} is {feature.status.value}, not suggested"
            )
        if item_id in self.suggestion_queue:
            self.suggestion_queue.remove(item_id)
        if accept:
            feature.transition(LabelStatus.ACCEPTED)
            self._record(
                EditEvent(
                    t=self.now,
                    kind=EventKind.ACCEPT,
                    target=item_id,
                    origin=feature.label_origin,
                    label=feature.label,
                )
            )
            if commit:
                feature.transition(LabelStatus.COMMITTED)
                self._record(
                    EditEvent(
                        t=self.now,
                        kind=EventKind.COMMIT,
                        target=item_id,
                        origin=feature.label_origin,
                        label=feature.label,
                    )
                )
        else:
            feature.transition(LabelStatus.REJECTED)
            self._record(
                EditEvent(
                    t=self.now,
                    kind=EventKind.REJECT,
                    target=item_id,
                    origin=feature.label_origin,
                    label=feature.label,
                )
            )
        return feature

    def decide_batch(
        self,
        decisions: list[tuple[str, bool]],
        duration: TimeStamp = 0,
        commit: bool = True,
    ) -> list[Feature]:
        self._advance(duration)
        return [self.decide(i, a, duration=0, commit=commit) for i, a in decisions]

    def commit_accepted(self, item_ids: list[str] | None = None, duration: TimeStamp = 0) -> int:
        self._advance(duration)
        count = 0
        for feature in self.work.features:
            if feature.status != LabelStatus.ACCEPTED:
                continue
            if item_ids is not None and feature.id not in item_ids:
                continue
            feature.transition(LabelStatus.COMMITTED)
            self._record(
                EditEvent(
                    t=self.now,
                    kind=EventKind.COMMIT,
                    target=feature.id,
                    origin=feature.label_origin,
                    label=feature.label,
                )
            )
            count += 1
        return count

    # -- propagation (PlusPropagation and up) -------------------------------------

    def propagate_suggest(
        self,
        k: int,
        duration: TimeStamp = 0,
        use_mask: bool = True,
        min_score: float | None = None,
    ) -> list[Candidate]:
        self._require(CapabilityLevel.PLUS_PROPAGATION, "propagate")
        self._advance(duration)
        target = self.spec.target_class
        positives = tuple(
            f.id
            for f in self.work.features
            if f.status in (LabelStatus.COMMITTED, LabelStatus.ACCEPTED)
            and f.label == target and f.id in self.embedding_index
        )
        negatives = tuple(
            f.id
            for f in self.work.features
            if f.status in (LabelStatus.COMMITTED, LabelStatus.ACCEPTED)
            and f.label != target and f.id in self.embedding_index
        )
        seeds = SeedSet(label=target, positive_ids=positives, negative_ids=negatives)
        pool = self.pool_ids(use_mask=use_mask)
        self.compute_cost += max(1, len(pool) // 1000)
        candidates = propagate(seeds, self.embedding_index, pool, k)
        if min_score is not None:
            candidates = [c for c in candidates if c.score >= min_score]
        for c in candidates:
            self._suggest(c.item_id, target, LabelOrigin.PROPAGATION, score=c.score)
        return candidates

    # -- dual modeling (PlusScaling and up) ----------------------------------------

    def _labeled_examples(self) -> list[tuple[np.ndarray, str]]:
        return [
            (self.embedding_index.vector(f.id), f.label)
            for f in self.work.features
            if f.status in (LabelStatus.COMMITTED, LabelStatus.ACCEPTED)
            and f.label and f.id in self.embedding_index
        ]

    def dual_step(
        self, duration: TimeStamp = 0, review_budget: int = 10, use_mask: bool = True
    ) -> tuple[str, list[str]]:
        """Fit, predict the masked pool, rank uncertain unlabeled cells.

        Returns (surface artifact id, review queue of cell ids).
        """
        self._require(CapabilityLevel.PLUS_SCALING, "dual_loop_step")
        self._advance(duration)
        examples = self._labeled_examples()
        n = self.grid.n_cells
        if use_mask and CROPLAND_LAYER in self.workspace.rasters:
            keep = self.workspace.rasters[CROPLAND_LAYER].band("mask") == 1.0
            pool = [cell_id(i) for i in range(n) if keep[i]]
        else:
            pool = [cell_id(i) for i in range(n)]
        surface, confidence, model = fit_and_predict(
            examples, self.embedding_index, pool, self.grid
        )
        self.compute_cost += max(1, len(pool) // 1000)

        self.loop_state.iteration += 1
        artifact_id = f"surface_{self.loop_state.iteration:03d}"
        self.workspace.rasters[artifact_id] = surface
        digest = model.training_digest(examples)
        if artifact_id not in self.workspace.artifacts:
            self.workspace.register_artifact(
                Artifact(
                    id=artifact_id,
                    kind=ArtifactKind.RASTER,
                    payload_ref=artifact_id,
                    provenance=ProvenanceRecord(
                        producer="dual_model",
                        created_at=self.now,
                        param_digest=digest,
                    ),
                )
            )
        self.loop_state.labeled_digest = digest
        self.loop_state.last_surface_artifact = artifact_id
        self._last_surface = surface

        # Review queue: least-confident *unlabeled* cells.
        labeled = self.unavailable_ids()
        conf = confidence.bands[CONFIDENCE_BAND].copy()
        for i in range(n):
            if cell_id(i) in labeled:
                conf[i] = confidence.nodata
        review: list[str] = []
        if np.any(conf != confidence.nodata):
            masked = GridRaster(
                origin=confidence.origin,
                cell_size=confidence.cell_size,
                width=confidence.width,
                height=confidence.height,
                bands={CONFIDENCE_BAND: conf},
                nodata=confidence.nodata,
            )
            patches = sample_uncertainty(masked, review_budget, band=CONFIDENCE_BAND)
            review = [p.cell_ids[0] for p in patches]
        self.loop_state.review_queue = review
        return artifact_id, review

    def suggest_from_surface(
        self,
        threshold: float = 0.8,
        limit: int | None = None,
        duration: TimeStamp = 0,
        target_only: bool = True,
    ) -> list[str]:
        self._require(CapabilityLevel.PLUS_SCALING, "suggest_from_surface")
        self._advance(duration)
        if self.loop_state.last_surface_artifact is None:
            raise NotFound("no probability surface yet; run dual_step first")
        surface = self.workspace.rasters[self.loop_state.last_surface_artifact]
        confident = surface_confident_cells(surface, threshold)
        taken = self.unavailable_ids()
        picks = [
            (item_id, label, p)
            for item_id, label, p in confident
            if item_id not in taken and (not target_only or label == self.spec.target_class)
        ]
        picks.sort(key=lambda x: (-x[2], x[0]))
        if limit is not None:
            picks = picks[:limit]
        out = []
        for item_id, label, p in picks:
            if self._suggest(item_id, label, LabelOrigin.DUAL_MODEL, score=p) is not None:
                out.append(item_id)
        return out

    # -- compute graphs (PlusScaling; explicit budgets need PlusAgent) -------------

    def run_graph(
        self,
        spec: dict | ComputeGraph,
        budget: Budget | None = None,
        token=None,
        duration: TimeStamp = 0,
    ):
        self._require(CapabilityLevel.PLUS_SCALING, "compute graphs")
        if budget is not None:
            self._require(CapabilityLevel.PLUS_AGENT, "execution budgets")
        self._advance(duration)
        graph = spec if isinstance(spec, ComputeGraph) else build_graph(spec)
        report = execute(
            graph, self.workspace, budget, token, registry=self.registry, now=self.now
        )
        self.compute_cost += report.cost_units + report.perceptor_calls
        return report

    # -- agent primitives (PlusAgent) ----------------------------------------------

    def navigate(
        self, query_kind: QueryKind, patch_budget: int, params: dict | None = None
    ) -> ContextBundle:
        self._require(CapabilityLevel.PLUS_AGENT, "navigation")
        return build_context(query_kind, self.workspace, patch_budget, params)

    def perceive_cells(
        self,
        item_ids: list[str],
        question: str,
        task: PerceptionTask = PerceptionTask.CLASSIFY,
        duration: TimeStamp = 0,
    ) -> list[PerceptionResult]:
        self._require(CapabilityLevel.PLUS_AGENT, "perception")
        self._advance(duration)
        patches = tuple(
            PatchRef(
                bbox=self.grid.cell_bbox(cell_index(i)),
                timestamp=self.grid.timestamp or 0,
                layer_view="rgb",
                cell_ids=(i,),
                zoom=8,
            )
            for i in item_ids
        )
        query = PerceptionQuery(
            patches=patches,
            task=task,
            question=question,
            classes=tuple(self.reference.class_names),
        )
        results = self.registry.perceive(query)
        self.compute_cost += 1
        for patch, result in zip(patches, results):
            self.memory.write(
                geometry=bbox_to_polygon(patch.bbox),
                timestamp=self.now,
                query=question,
                notes=result.note,
                author=Author.AGENT,
            )
        return results

    def suggest_from_perception(
        self, item_ids: list[str], results: list[PerceptionResult], duration: TimeStamp = 0
    ) -> list[str]:
        self._require(CapabilityLevel.PLUS_AGENT, "perception suggestions")
        self._advance(duration)
        out = []
        for item_id, result in zip(item_ids, results):
            if not result.answerable:
                continue
            label = result.label
            if self.spec.task == TaskKind.BINARY_CLASSIFY:
                label = label if label == self.spec.target_class else OTHER_LABEL
            if self._suggest(item_id, label, LabelOrigin.PERCEPTOR, result.confidence):
                out.append(item_id)
        return out

    def memory_write(self, geometry: Polygon, query: str, notes: str = "", duration: TimeStamp = 0) -> str:
        self._require(CapabilityLevel.PLUS_AGENT, "geo-memory")
        self._advance(duration)
        return self.memory.write(
            geometry=geometry, timestamp=self.now, query=query, notes=notes, author=Author.USER
        )

    def memory_retrieve(self, **kwargs):
        self._require(CapabilityLevel.PLUS_AGENT, "geo-memory")
        return self.memory.retrieve(**kwargs)

    def memory_curate(self, entry_id: str, action: CurateAction, **kwargs):
        self._require(CapabilityLevel.PLUS_AGENT, "geo-memory")
        return self.memory.curate(entry_id, action, **kwargs)

    def attach(self, request: AttributionRequest, duration: TimeStamp = 0) -> Feature:
        self._require(CapabilityLevel.PLUS_AGENT, "attribution")
        self._advance(duration)
        layer_name, feature = self._find_feature(request.feature_id)
        attach_attributes(request, feature, self.workspace)
        self._record(
            EditEvent(
                t=self.now,
                kind=EventKind.ATTRIBUTE,
                target=feature.id,
                origin=feature.label_origin,
                label=feature.label,
            )
        )
        return feature

    def _find_feature(self, feature_id: str):
        for name, layer in self.workspace.vectors.items():
            feature = layer.get(feature_id)
            if feature is not None:
                return name, feature
        raise NotFound(f"no feature {feature_id!r} in any layer")

    def summarize_memory(self, duration: TimeStamp = 0) -> str:
        """Condense memory notes into a report artifact (image-summary story)."""
        self._require(CapabilityLevel.PLUS_AGENT, "memory summary")
        self._advance(duration)
        from collections import Counter

        entries = self.memory.retrieve(temporal=self.workspace.time_window, limit=10_000)
        counts = Counter()
        for entry in entries:
            for name in self.reference.class_names:
                if name in entry.notes:
                    counts[name] += 1
        lines = [f"{name}: seen in {n} patch note(s)" for name, n in sorted(counts.items())]
        artifact_id = f"summary_{len(self.workspace.artifacts):03d}"
        self.workspace.register_artifact(
            Artifact(
                id=artifact_id,
                kind=ArtifactKind.REPORT,
                payload_ref="memory-summary",
                payload={"entries": len(entries), "summary": lines},
                provenance=ProvenanceRecord(producer="memory-summary", created_at=self.now),
            )
        )
        return artifact_id

    def aggregate_buildings(
        self, threshold: float = 0.5, duration: TimeStamp = 0
    ) -> str:
        """Mean the damage surface per building footprint; report + validate.

        Validation (evaluator context): fraction of withheld destroyed-building
        centroids that fall inside footprints predicted damaged.
        """
        self._require(CapabilityLevel.PLUS_SCALING, "building aggregation")
        self._advance(duration)
        if self.loop_state.last_surface_artifact is None:
            raise NotFound("no probability surface yet; run dual_step first")
        surface = self.workspace.rasters[self.loop_state.last_surface_artifact]
        band = f"p_{self.spec.target_class}"
        if band not in surface.bands:
            raise NotFound(f"surface has no band {band!r}")
        buildings = self.workspace.vectors.get("buildings")
        if buildings is None:
            raise NotFound("world has no buildings layer")

        from ..core.zonal import zonal_stats

        scores: dict[str, dict] = {}
        for feature in buildings.features:
            try:
                stats = zonal_stats(surface, band, feature.geometry)
                score = stats["mean"]
            except Exception:
                score = 0.0
            scores[feature.id] = {"score": score, "damaged": bool(score >= threshold)}

        destroyed = self.reference.read_destroyed_buildings("scenario-validation")
        inside = 0
        for building_id in destroyed:
            feature = buildings.get(building_id)
            entry = scores.get(building_id)
            if feature is not None and entry is not None and entry["damaged"]:
                inside += 1
        fraction = inside / len(destroyed) if destroyed else 1.0

        artifact_id = f"building_damage_{len(self.workspace.artifacts):03d}"
        self.workspace.register_artifact(
            Artifact(
                id=artifact_id,
                kind=ArtifactKind.REPORT,
                payload_ref="building-damage",
                payload={
                    "threshold": threshold,
                    "buildings": scores,
                    "validation_fraction": fraction,
                },
                provenance=ProvenanceRecord(
                    producer="building-aggregation", created_at=self.now
                ),
            )
        )
        return artifact_id

    # -- lifecycle -------------------------------------------------------------------

    def finish(self) -> None:
        if self.done:
            return
        self._flush_due_ticks()
        end = min(self.now, self.spec.t_max)
        if not self.samples or self.samples[-1].t != end:
            self._emit_sample(end)
        self.done = True

    def validity_flags(self):
        from .metrics import ValidityFlags

        geometry_ok = True
        schema_ok = True
        for layer in self.workspace.vectors.values():
            for feature in layer.features:
                if feature.status != LabelStatus.COMMITTED:
                    continue
                try:
                    feature.geometry.validate()
                except Exception:
                    geometry_ok = False
                if not feature.label:
                    schema_ok = False
        crs_ok = len({layer.crs for layer in self.workspace.vectors.values()} | {CRS_TAG}) == 1
        return ValidityFlags(
            geometry_valid=geometry_ok, crs_consistent=crs_ok, schema_valid=schema_ok
        )

    def committed_triples(self):
        """(assigned, true, origin) per committed work feature; evaluator-only."""
        truth = self.reference.read_labels("evaluator")
        truth_t2 = self.reference.read_labels_t2("evaluator")
        names = self.reference.class_names
        target = self.spec.target_class
        triples = []
        for feature in self.work.features:
            if feature.status != LabelStatus.COMMITTED or not feature.label:
                continue
            idx = cell_index(feature.id)
            if target == "changed" and truth_t2 is not None:
                true_label = "changed" if truth[idx] != truth_t2[idx] else OTHER_LABEL
            elif self.spec.task == TaskKind.BINARY_CLASSIFY:
                true_name = names[int(truth[idx])]
                true_label = target if true_name == target else OTHER_LABEL
            else:
                true_label = names[int(truth[idx])]
            triples.append((feature.label, true_label, feature.label_origin))
        return triples

    def metrics(self):
        from .metrics import (
            MetricsReport,
            compute_progress_auc,
            compute_rework_rate,
            compute_suggestion_bias,
            compute_time_to_threshold,
            decision_rates,
        )

        self.finish()
        accept_rate, reject_rate = decision_rates(self.ledger.events)
        return MetricsReport(
            time_to_threshold=compute_time_to_threshold(self.samples, self.spec.tau),
            progress_auc=compute_progress_auc(self.samples, self.spec.t_max),
            rework_rate=compute_rework_rate(self.ledger.events),
            suggestion_bias=compute_suggestion_bias(self.committed_triples()),
            accept_rate=accept_rate,
            reject_rate=reject_rate,
            compute_cost=self.compute_cost,
            validity=self.validity_flags(),
        )

    def log_lines(self) -> list[dict]:
        meta = {
            "type": "meta",
            "t": 0,
            "spec": self.spec.to_json(),
            "compute_cost": self.compute_cost,
        }
        ordered = [obj for _, _, obj in sorted(self._log, key=lambda x: (x[0], x[1]))]
        return [meta] + ordered
