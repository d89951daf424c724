import json

import pytest

from geoagency.cli import bundle_digest, main
from geoagency.core import load_workspace


def test_world_generate_roundtrip(tmp_path):
    out = tmp_path / "w"
    assert main(["world", "--seed", "3", "--out", str(out)]) == 0
    workspace = load_workspace(out)
    assert "embeddings" in workspace.rasters
    assert workspace.rng_seed == 3


def test_world_determinism(tmp_path):
    main(["world", "--seed", "3", "--out", str(tmp_path / "a")])
    main(["world", "--seed", "3", "--out", str(tmp_path / "b")])
    assert bundle_digest(tmp_path / "a") == bundle_digest(tmp_path / "b")


def test_usage_error_exit_1():
    assert main(["scenario", "not-a-scenario"]) == 1
    assert main(["frobnicate"]) == 1


def test_bench_run_matrix(tmp_path):
    config = {
        "session": {
            "task": "binary_classify",
            "target_class": "class0",
            "tau": 0.8,
            "t_max": 600,
            "eval_interval": 60,
            "world": {"width": 16, "height": 16, "n_classes": 2, "voronoi_sites": 6},
        },
        "capabilities": ["baseline", "plus_propagation", "plus_scaling", "plus_agent"],
        "seeds": [0, 1, 2, 3, 4],
    }
    config_path = tmp_path / "bench.json"
    config_path.write_text(json.dumps(config))
    out = tmp_path / "results"
    assert main(["bench", "run", "--config", str(config_path), "--out", str(out)]) == 0
    rows = (out / "summary.csv").read_text().strip().splitlines()
    assert rows[0] == "session_id,capability,T_tau,auc,rework,bias,accept_rate,cost"
    assert len(rows) == 1 + 20  # 4 capabilities x 5 seeds
    session_dirs = [p for p in out.iterdir() if p.is_dir()]
    assert len(session_dirs) == 20
    for d in session_dirs:
        assert (d / "metrics.json").exists()
        assert (d / "log.jsonl").exists()


def test_scenario_hash_stable(tmp_path):
    code = main(["scenario", "summarize", "--seed", "5", "--out", str(tmp_path / "one")])
    assert code == 0
    main(["scenario", "summarize", "--seed", "5", "--out", str(tmp_path / "two")])
    assert bundle_digest(tmp_path / "one") == bundle_digest(tmp_path / "two")
    main(["scenario", "summarize", "--seed", "6", "--out", str(tmp_path / "three")])
    assert bundle_digest(tmp_path / "one") != bundle_digest(tmp_path / "three")


def test_graph_run_over_bundle(tmp_path):
    world_dir = tmp_path / "world"
    main(["world", "--seed", "2", "--out", str(world_dir)])
    spec = {
        "nodes": [
            {"id": "ndvi", "op": "ndvi_index", "params": {"layer": "s2_t0"}},
            {"id": "veg", "op": "threshold", "params": {"band": "ndvi", "value": 0.4},
             "inputs": ["ndvi"]},
            {"id": "out", "op": "export", "params": {"name": "veg-mask"}, "inputs": ["veg"]},
        ],
        "outputs": ["out"],
    }
    spec_path = tmp_path / "g.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "run"
    code = main([
        "graph", "run", "--spec", str(spec_path), "--workspace", str(world_dir),
        "--budget", '{"max_cost_units": 50}', "--out", str(out),
    ])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "complete"
    bundle = load_workspace(out / "bundle")
    assert report["produced_artifacts"][0] in bundle.artifacts


def test_graph_partial_writes_continuation(tmp_path):
    world_dir = tmp_path / "world"
    main(["world", "--seed", "2", "--out", str(world_dir)])
    spec = {
        "nodes": [
            {"id": "ndvi", "op": "ndvi_index", "params": {"layer": "s2_t0"}},
            {"id": "veg", "op": "threshold", "params": {"band": "ndvi", "value": 0.4},
             "inputs": ["ndvi"]},
        ],
        "outputs": ["veg"],
    }
    spec_path = tmp_path / "g.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "run"
    code = main([
        "graph", "run", "--spec", str(spec_path), "--workspace", str(world_dir),
        "--budget", '{"max_cost_units": 2}', "--out", str(out),
    ])
    assert code == 0
    assert (out / "continuation.json").exists()
    # Resume from the written bundle + token to completion.
    out2 = tmp_path / "run2"
    code = main([
        "graph", "run", "--spec", str(spec_path), "--workspace", str(out / "bundle"),
        "--budget", '{"max_cost_units": 2}',
        "--continuation", str(out / "continuation.json"),
        "--out", str(out2),
    ])
    assert code == 0
    report = json.loads((out2 / "report.json").read_text())
    assert report["status"] == "complete"


def test_dual_loop_quality_nondecreasing(tmp_path):
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["dual-loop", "--rounds", "3", "--seed", "1"])
    assert code == 0
    payload = json.loads(buf.getvalue())
    quality = payload["quality_by_round"]
    assert len(quality) == 3
    assert all(b >= a - 1e-9 for a, b in zip(quality, quality[1:]))
