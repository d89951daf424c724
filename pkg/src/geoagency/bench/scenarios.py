"""Scripted end-to-end scenarios.

Each scenario is a JSON action list (data, not code) interpreted against a
SessionClient, so the identical script can drive an in-process session or
a remote one over HTTP. The simulated reviewer accepts a suggestion iff it
matches their noisy belief about the cell.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..embeddings import cell_id, cell_index
from ..errors import SpecInvalid
from .actors import SessionClient
from .evaluator import SealedReference
from .session import SessionSpec
from .simuser import SimUserPolicy, noisy_belief
from .worldgen import generate_world

SCENARIO_NAMES = ("summarize", "crop-map", "flood")


def scenario_path(name: str) -> Path:
    if name not in SCENARIO_NAMES:
        raise SpecInvalid(f"unknown scenario {name!r}; have {SCENARIO_NAMES}")
    return Path(str(resources.files("geoagency.bench") / "scenarios" / f"{name}.json"))


def load_scenario(name: str) -> dict:
    with open(scenario_path(name), encoding="utf-8") as f:
        return json.load(f)


def scenario_spec(name: str, seed: int) -> SessionSpec:
    scenario = load_scenario(name)
    spec_json = dict(scenario["session"])
    spec_json["seed"] = seed
    return SessionSpec.from_json(spec_json)


class ScenarioRunner:
    def __init__(
        self,
        client: SessionClient,
        reference: SealedReference,
        policy: SimUserPolicy | None = None,
    ):
        self.client = client
        self.reference = reference
        self.policy = policy or SimUserPolicy()
        spec = client.spec
        self._belief = lambda item_id: noisy_belief(
            reference,
            spec.task,
            spec.target_class,
            self.policy.manual_error_rate,
            spec.seed,
            item_id,
        )
        # Local geometry context (deterministic regeneration, no API reads).
        self._workspace, _ = generate_world(spec.world, spec.seed)

    # -- costs ------------------------------------------------------------------

    @property
    def manual_cost(self) -> int:
        return max(1, round(60.0 / self.policy.labels_per_minute))

    @property
    def review_cost(self) -> int:
        return max(1, round(60.0 / self.policy.reviews_per_minute))

    def batch_cost(self, n: int) -> int:
        return max(1, round(n * 60.0 / self.policy.batch_reviews_per_minute))

    # -- shared moves --------------------------------------------------------------

    def _review_queue(self, batch: bool) -> int:
        queue = self.client.queue()
        if not queue:
            return 0
        decisions = [
            {"item_id": q["item_id"], "accept": self._belief(q["item_id"]) == q["label"]}
            for q in queue
        ]
        duration = self.batch_cost(len(queue)) if batch else self.review_cost * len(queue)
        self.client.decide_batch(decisions, duration=duration)
        return len(queue)

    def _manual(self, item_id: str) -> None:
        self.client.manual_create(item_id, self._belief(item_id), duration=self.manual_cost)

    def _grid(self):
        return self._workspace.rasters["embeddings"]

    def _cell_of_feature(self, layer: str, feature_id: str) -> str:
        feature = self._workspace.vectors[layer].get(feature_id)
        c = feature.geometry.centroid()
        grid = self._grid()
        col = int((c.x - grid.origin.x) / grid.cell_size)
        row = int((c.y - grid.origin.y) / grid.cell_size)
        return cell_id(row * grid.width + col)

    # -- actions ---------------------------------------------------------------------

    def run(self, actions: list[dict]) -> None:
        for action in actions:
            op = action["op"]
            handler = getattr(self, f"_op_{op.replace('-', '_')}", None)
            if handler is None:
                raise SpecInvalid(f"unknown scenario op {op!r}")
            handler(action)
        self.client.finish()

    def _op_seed_manual(self, action: dict) -> None:
        bundle = self.client.navigate("explore", int(action.get("count", 10)))
        for patch in bundle["patches"]:
            self._manual(patch["cell_ids"][0])

    def _op_seed_perception(self, action: dict) -> None:
        count = int(action.get("count", 10))
        bundle = self.client.navigate("explore", count)
        ids = [p["cell_ids"][0] for p in bundle["patches"]]
        results = self.client.perceive(ids, action.get("question", "what class is this cell?"),
                                       task="classify", duration=2)
        self.client.suggest_from_perception(ids, results, duration=0)
        self._review_queue(batch=False)

    def _op_seed_confirmed(self, action: dict) -> None:
        layer = action.get("layer", "confirmed_destroyed")
        for feature_id in self.client.vector_feature_ids(layer):
            self._manual(self._cell_of_feature(layer, feature_id))

    def _op_seed_contrast(self, action: dict) -> None:
        count = int(action.get("count", 8))
        bundle = self.client.navigate(
            "change_detect", count,
            {"before_layer": "embeddings", "after_layer": "embeddings_t2"},
        )
        for patch in bundle["patches"]:
            self._manual(patch["cell_ids"][0])
        # Balance with presumed-stable cells from a row-major scan.
        grid = self._grid()
        taken = set(self.client.committed_labels())
        labeled = 0
        for i in range(grid.n_cells):
            if labeled >= count:
                break
            item_id = cell_id(i)
            if item_id in taken:
                continue
            self._manual(item_id)
            labeled += 1

    def _op_ndvi_graph_attach(self, action: dict) -> None:
        n_dates = self.client.spec.world.n_dates
        nodes = [
            {"id": f"ndvi{i}", "op": "ndvi_index", "params": {"layer": f"s2_t{i}"}}
            for i in range(n_dates)
        ]
        spec = {"nodes": nodes, "outputs": [n["id"] for n in nodes]}
        report = self.client.run_graph(spec, duration=2)
        artifacts = report["produced_artifacts"]
        prefix = artifacts[0][: -len("0")]
        features = self.client.committed_feature_ids("work")
        limit = int(action.get("max_features", 10))
        for feature_id in features[:limit]:
            self.client.attach(
                {
                    "feature_id": feature_id,
                    "shape_metrics": True,
                    "series": [[prefix, "ndvi", "ndvi"]],
                },
                duration=1,
            )

    def _op_propagate_review_rounds(self, action: dict) -> None:
        k = int(action.get("k", 25))
        for _ in range(int(action.get("rounds", 3))):
            suggested = self.client.propagate(k, duration=1)
            if not suggested:
                break
            self._review_queue(batch=False)

    def _op_dual_rounds(self, action: dict) -> None:
        threshold = float(action.get("threshold", 0.62))
        limit = int(action.get("limit", 400))
        review_budget = int(action.get("review_budget", 5))
        for _ in range(int(action.get("rounds", 2))):
            _, review = self.client.dual_step(duration=2, review_budget=review_budget)
            for item_id in review:
                self._manual(item_id)
            suggested = self.client.suggest_surface(threshold, limit, duration=1)
            if suggested:
                self._review_queue(batch=True)

    def _op_uncertainty_qc(self, action: dict) -> None:
        budget = int(action.get("budget", 10))
        _, review = self.client.dual_step(duration=2, review_budget=budget)
        for item_id in review:
            self._manual(item_id)

    def _op_memory_note(self, action: dict) -> None:
        # Notes ride on perception over a coverage pass (memory write path).
        bundle = self.client.navigate(
            "map", int(action.get("count", 4)), {"stride": int(action.get("stride", 8))}
        )
        ids = [p["cell_ids"][0] for p in bundle["patches"]]
        self.client.perceive(ids, action.get("question", "describe this area"),
                             task="caption", duration=2)

    def _op_summary_report(self, action: dict) -> None:
        self.client.summarize_memory(duration=2)

    def _op_aggregate_buildings(self, action: dict) -> None:
        self.client.aggregate_buildings(float(action.get("threshold", 0.5)), duration=2)

    def _op_done(self, action: dict) -> None:
        self.client.finish()


def run_scenario_in_process(name: str, seed: int, policy: SimUserPolicy | None = None):
    """Returns (client, scenario dict) after running the full action list."""
    from .actors import InProcessClient
    from .session import Session

    scenario = load_scenario(name)
    spec = scenario_spec(name, seed)
    session = Session(spec)
    client = InProcessClient(session)
    runner = ScenarioRunner(client, session.reference, policy)
    runner.run(scenario["actions"])
    return client, scenario
