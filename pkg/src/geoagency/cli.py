"""Operator entry points: `agency world|bench|scenario|graph|serve|dual-loop`.

Exit codes: 0 success, 1 validation/usage error, 2 runtime error. Every
subcommand is deterministic under --seed; --out directories are
self-contained workspace bundles.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

from .bench import (
    BenchConfig,
    CapabilityLevel,
    SessionSpec,
    SimUserPolicy,
    WorldSpec,
    generate_world,
    run_bench,
    world_digest,
)
from .bench.actors import InProcessClient
from .bench.scenarios import SCENARIO_NAMES, ScenarioRunner, load_scenario, scenario_spec
from .bench.session import Session
from .core import load_workspace, save_workspace
from .errors import AgencyError, ValidationError
from .graphs import Budget, ContinuationToken, build_graph, execute


@click.group()
def cli():
    """Agency primitives runtime and productivity benchmark."""


# -- world ----------------------------------------------------------------------


@cli.command("world")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="WorldSpec JSON file; defaults to a 32x32 two-class world.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def world_cmd(spec_path, seed, out_dir):
    """Generate a synthetic world and write it as a workspace bundle."""
    spec = WorldSpec() if spec_path is None else WorldSpec.from_json(
        json.loads(Path(spec_path).read_text())
    )
    workspace, _ = generate_world(spec, seed)
    save_workspace(workspace, out_dir)
    digest = world_digest(workspace)
    click.echo(f"world written to {out_dir} (digest {digest[:16]})")


# -- bench ----------------------------------------------------------------------


@cli.command("bench")
@click.argument("action", type=click.Choice(["run"]))
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def bench_cmd(action, config_path, out_dir, jobs):
    """Run the benchmark matrix from a bench.json config."""
    config = BenchConfig.from_json(json.loads(Path(config_path).read_text()))
    results = run_bench(config, Path(out_dir), jobs=jobs)
    reached = sum(1 for r in results if r.metrics.time_to_threshold is not None)
    click.echo(
        f"{len(results)} sessions -> {out_dir}/summary.csv "
        f"({reached} reached tau)"
    )


# -- scenario --------------------------------------------------------------------


def _write_session_outputs(client: InProcessClient, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    session = client.session
    save_workspace(session.workspace, out / "bundle")
    session.memory.save_jsonl(out / "bundle" / "memory.jsonl")
    (out / "metrics.json").write_text(json.dumps(client.metrics(), indent=2))
    with open(out / "log.jsonl", "w", encoding="utf-8") as f:
        for line in client.log_lines():
            f.write(json.dumps(line))
            f.write("\n")


@cli.command("scenario")
@click.argument("name", type=click.Choice(list(SCENARIO_NAMES)))
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def scenario_cmd(name, seed, out_dir):
    """Run a scripted end-to-end scenario with a simulated user."""
    scenario = load_scenario(name)
    spec = scenario_spec(name, seed)
    session = Session(spec)
    client = InProcessClient(session)
    ScenarioRunner(client, session.reference).run(scenario["actions"])
    metrics = client.metrics()
    if out_dir is not None:
        _write_session_outputs(client, Path(out_dir))
    click.echo(json.dumps(metrics, indent=2))


# -- graph -----------------------------------------------------------------------


@cli.command("graph")
@click.argument("action", type=click.Choice(["run"]))
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--workspace", "workspace_dir", type=click.Path(exists=True), required=True)
@click.option("--budget", "budget_json", type=str, default=None,
              help='JSON, e.g. {"max_cost_units": 50}')
@click.option("--continuation", "token_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def graph_cmd(action, spec_path, workspace_dir, budget_json, token_path, out_dir):
    """Build and execute a compute graph over a workspace bundle."""
    workspace = load_workspace(workspace_dir)
    graph = build_graph(json.loads(Path(spec_path).read_text()))
    budget = Budget.from_json(json.loads(budget_json)) if budget_json else None
    token = (
        ContinuationToken.from_json(json.loads(Path(token_path).read_text()))
        if token_path
        else None
    )
    report = execute(graph, workspace, budget, token)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_workspace(workspace, out / "bundle")
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2))
    if report.continuation is not None:
        (out / "continuation.json").write_text(
            json.dumps(report.continuation.to_json(), indent=2)
        )
    click.echo(f"{report.status.value}: {len(report.completed)}/{len(graph.nodes)} nodes")


# -- dual-loop --------------------------------------------------------------------


@cli.command("dual-loop")
@click.option("--rounds", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def dual_loop_cmd(rounds, seed, out_dir):
    """Scripted dual-modeling run: seeds, then N fit/review rounds."""
    from .bench.simuser import SimUserPolicy, noisy_belief

    spec = SessionSpec(
        capability=CapabilityLevel.PLUS_SCALING,
        seed=seed,
        world=WorldSpec(width=32, height=32, n_classes=2),
        target_class="class0",
    )
    session = Session(spec)
    client = InProcessClient(session)
    policy = SimUserPolicy()
    belief = lambda item_id: noisy_belief(
        session.reference, spec.task, spec.target_class,
        policy.manual_error_rate, seed, item_id,
    )
    bundle_ids = [f"cell_{i:06d}" for i in range(0, session.grid.n_cells,
                                                 session.grid.n_cells // policy.seed_labels)]
    for item_id in bundle_ids[: policy.seed_labels]:
        client.manual_create(item_id, belief(item_id), duration=5)
    f1_by_round = []
    for _ in range(rounds):
        _, review = client.dual_step(duration=2, review_budget=5)
        for item_id in review:
            client.manual_create(item_id, belief(item_id), duration=5)
        suggested = client.suggest_surface(policy.surface_threshold, 300, duration=1)
        if suggested:
            queue = client.queue()
            decisions = [
                {"item_id": q["item_id"], "accept": belief(q["item_id"]) == q["label"]}
                for q in queue
            ]
            client.decide_batch(decisions, duration=max(1, len(decisions) // 5))
        f1_by_round.append(session.evaluator.quality(session.committed_labels()))
    client.finish()
    if out_dir is not None:
        _write_session_outputs(client, Path(out_dir))
    click.echo(json.dumps({"rounds": rounds, "quality_by_round": f1_by_round}, indent=2))


# -- serve ------------------------------------------------------------------------


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True), default=None,
              help="Serve a built UI bundle from this directory.")
def serve_cmd(host, port, ui_dir):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=port, log_level="warning")


def bundle_digest(path) -> str:
    """Stable content hash over every file in a bundle directory."""
    root = Path(path)
    h = hashlib.sha256()
    for file in sorted(p for p in root.rglob("*") if p.is_file()):
        h.update(str(file.relative_to(root)).encode())
        h.update(file.read_bytes())
    return h.hexdigest()


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 1
    except AgencyError as exc:
        click.echo(f"runtime error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        click.echo(f"runtime error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
