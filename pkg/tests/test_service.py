import base64
import json

import pytest
from fastapi.testclient import TestClient

from geoagency.bench import CapabilityLevel, SessionSpec, WorldSpec
from geoagency.bench.actors import InProcessClient
from geoagency.bench.scenarios import ScenarioRunner, load_scenario, scenario_spec
from geoagency.bench.session import Session
from geoagency.bench.worldgen import generate_world
from geoagency.service import create_app
from geoagency.service.client import HttpSessionClient


@pytest.fixture
def client():
    with TestClient(create_app()) as c:
        yield c


def small_spec_json(capability="plus_agent", seed=3):
    return SessionSpec(
        capability=CapabilityLevel(capability),
        seed=seed,
        world=WorldSpec(width=8, height=8, n_classes=2, voronoi_sites=4),
        target_class="class0",
        t_max=600,
    ).to_json()


def make_session(client, **kw):
    response = client.post("/v1/sessions", json={"spec": small_spec_json(**kw)})
    assert response.status_code == 200
    return response.json()["session_id"]


def test_create_and_state(client):
    sid = make_session(client)
    state = client.get(f"/v1/sessions/{sid}/state").json()
    assert state["now"] == 0
    assert state["capability"] == "plus_agent"
    assert not state["done"]


def test_unknown_session_404(client):
    assert client.get("/v1/sessions/snope/state").status_code == 404


def test_decide_empty_batch_400(client):
    sid = make_session(client)
    response = client.post(
        f"/v1/sessions/{sid}/suggestions/decide",
        json={"decisions": [], "duration": 0},
    )
    assert response.status_code == 400


def test_accept_then_state_shows_accepted(client):
    sid = make_session(client)
    client.post(f"/v1/sessions/{sid}/features", json={"item_id": "cell_000000", "label": "class0"})
    client.post(f"/v1/sessions/{sid}/features", json={"item_id": "cell_000009", "label": "other"})
    response = client.post(f"/v1/sessions/{sid}/propagate", json={"k": 2})
    assert response.status_code == 200
    first = response.json()["candidates"][0]["item_id"]
    response = client.post(
        f"/v1/sessions/{sid}/suggestions/decide",
        json={"decisions": [{"item_id": first, "accept": True}], "commit": False},
    )
    assert response.status_code == 200
    layer = client.get(f"/v1/sessions/{sid}/layers/work").json()
    status = {f["id"]: f["properties"]["agency"]["status"] for f in layer["features"]}
    assert status[first] == "accepted"


def test_stale_candidate_409(client):
    sid = make_session(client)
    client.post(f"/v1/sessions/{sid}/features", json={"item_id": "cell_000000", "label": "class0"})
    client.post(f"/v1/sessions/{sid}/features", json={"item_id": "cell_000009", "label": "other"})
    first = client.post(f"/v1/sessions/{sid}/propagate", json={"k": 1}).json()["candidates"][0]["item_id"]
    payload = {"decisions": [{"item_id": first, "accept": True}]}
    assert client.post(f"/v1/sessions/{sid}/suggestions/decide", json=payload).status_code == 200
    assert client.post(f"/v1/sessions/{sid}/suggestions/decide", json=payload).status_code == 409


def test_capability_denied_403(client):
    sid = make_session(client, capability="baseline")
    response = client.post(f"/v1/sessions/{sid}/propagate", json={"k": 3})
    assert response.status_code == 403


def test_raster_tile_base64_roundtrip(client, tmp_path):
    sid = make_session(client)
    tile = client.get(f"/v1/sessions/{sid}/layers/embeddings").json()
    assert tile["encoding"] == "gridr-base64"
    blob = base64.b64decode(tile["data"])
    path = tmp_path / "tile.gridr"
    path.write_bytes(blob)
    from geoagency.core import read_gridr

    raster = read_gridr(path)
    assert raster.width == tile["width"] and raster.height == tile["height"]


def test_raster_tile_downsampled_to_cap(client):
    with TestClient(create_app()) as big_client:
        spec = SessionSpec(
            capability=CapabilityLevel.PLUS_AGENT,
            seed=1,
            world=WorldSpec(width=300, height=300, n_classes=2, voronoi_sites=4,
                            embedding_dim=2, n_dates=2),
            target_class="class0",
        ).to_json()
        sid = big_client.post("/v1/sessions", json={"spec": spec}).json()["session_id"]
        tile = big_client.get(f"/v1/sessions/{sid}/layers/embeddings").json()
        assert tile["width"] <= 256 and tile["height"] <= 256
        assert tile["full_width"] == 300


def test_memory_endpoints(client):
    sid = make_session(client)
    geometry = {
        "type": "Polygon",
        "coordinates": [[[1, 1], [2, 1], [2, 2], [1, 2], [1, 1]]],
    }
    response = client.post(
        f"/v1/sessions/{sid}/memory",
        json={"geometry": geometry, "query": "field note", "notes": "maize here"},
    )
    entry_id = response.json()["entry_id"]
    hits = client.get(f"/v1/sessions/{sid}/memory", params={"kw": "maize"}).json()["entries"]
    assert [e["id"] for e in hits] == [entry_id]
    response = client.post(
        f"/v1/sessions/{sid}/memory/{entry_id}/curate", json={"action": "confirm"}
    )
    assert response.json()["status"] == "confirmed"
    hits = client.get(f"/v1/sessions/{sid}/memory", params={"bbox": "0,0,3,3"}).json()["entries"]
    assert len(hits) == 1


def test_live_metrics_no_reference_leak(client):
    sid = make_session(client)
    client.post(f"/v1/sessions/{sid}/features", json={"item_id": "cell_000000", "label": "class0", "duration": 120})
    live = client.get(f"/v1/sessions/{sid}/metrics/live").json()
    assert {s["t"] for s in live["samples"]} >= {0, 60}
    text = json.dumps(live)
    for banned in ("labels", "reference", "truth", "correct"):
        assert banned not in text


def test_openapi_matches_committed_schema(client):
    committed = json.loads(open("api/schema.json", encoding="utf-8").read())
    live = client.get("/openapi.json").json()
    assert live == committed


def test_http_scenario_equivalence_small():
    # The crop-map script over ASGI-HTTP must reproduce the in-process
    # ledger and metrics exactly.
    scenario = load_scenario("crop-map")
    spec = scenario_spec("crop-map", seed=5)

    session = Session(spec)
    in_proc = InProcessClient(session)
    ScenarioRunner(in_proc, session.reference).run(scenario["actions"])
    expected_metrics = in_proc.metrics()
    expected_log = in_proc.log_lines()

    _, reference = generate_world(spec.world, spec.seed)
    http_client = HttpSessionClient(None, spec, http=TestClient(create_app()))
    ScenarioRunner(http_client, reference).run(scenario["actions"])
    got_metrics = http_client.metrics()
    got_log = http_client.log_lines()

    assert got_metrics == expected_metrics
    assert got_log == expected_log
