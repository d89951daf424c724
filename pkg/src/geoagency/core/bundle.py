"""Workspace bundle persistence.

Layout of a bundle directory:

    workspace.json      manifest (floats as C99 hex strings: lossless)
    rasters/<name>.gridr
    vectors/<name>.geojson
    artifacts/<id>.json
    memory.jsonl        written by the memory store, optional

Round-trips are exact: raster payloads are raw little-endian float64 and
manifest floats are hex-encoded, so load(save(w)) == w bit-for-bit.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from ..errors import SchemaError
from .artifacts import Artifact
from .geometry import GeoPoint, Polygon, TimeWindow
from .raster import read_gridr, write_gridr
from .vector import layer_from_geojson, layer_to_geojson
from .workspace import Workspace

BUNDLE_MAGIC = "AGENCY_WS"
BUNDLE_VERSION = 1

_SAFE_NAME = re.compile(r"[^A-Za-z0-9_.-]")


def _safe(name: str) -> str:
    return _SAFE_NAME.sub("_", name)


def _hex(value: float) -> str:
    return float(value).hex()


def _unhex(value: str) -> float:
    return float.fromhex(value)


def _ring_to_json(ring) -> list[list[str]]:
    return [[_hex(p.x), _hex(p.y)] for p in ring]


def _ring_from_json(obj) -> tuple[GeoPoint, ...]:
    return tuple(GeoPoint(_unhex(x), _unhex(y)) for x, y in obj)


def save_workspace(workspace: Workspace, path) -> None:
    root = Path(path)
    (root / "rasters").mkdir(parents=True, exist_ok=True)
    (root / "vectors").mkdir(parents=True, exist_ok=True)
    (root / "artifacts").mkdir(parents=True, exist_ok=True)

    raster_files = {}
    for name, raster in workspace.rasters.items():
        fname = f"{_safe(name)}.gridr"
        write_gridr(raster, root / "rasters" / fname)
        raster_files[name] = fname

    vector_files = {}
    for name, layer in workspace.vectors.items():
        fname = f"{_safe(name)}.geojson"
        with open(root / "vectors" / fname, "w", encoding="utf-8") as f:
            json.dump(layer_to_geojson(layer), f)
        vector_files[name] = fname

    for artifact in workspace.artifacts.values():
        with open(root / "artifacts" / f"{_safe(artifact.id)}.json", "w", encoding="utf-8") as f:
            json.dump(artifact.to_json(), f)

    manifest = {
        "magic": BUNDLE_MAGIC,
        "version": BUNDLE_VERSION,
        "rng_seed": workspace.rng_seed,
        "time_window": [workspace.time_window.start, workspace.time_window.end],
        "roi": {
            "exterior": _ring_to_json(workspace.roi.exterior),
            "holes": [_ring_to_json(h) for h in workspace.roi.holes],
        },
        "rasters": raster_files,
        "vectors": vector_files,
        "artifacts": sorted(workspace.artifacts),
    }
    with open(root / "workspace.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)


def load_workspace(path) -> Workspace:
    root = Path(path)
    manifest_path = root / "workspace.json"
    if not manifest_path.exists():
        raise SchemaError(f"no workspace.json under {root}")
    try:
        with open(manifest_path, encoding="utf-8") as f:
            manifest = json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"corrupt workspace manifest: {exc}") from exc

    if manifest.get("magic") != BUNDLE_MAGIC:
        raise SchemaError(f"bad bundle magic {manifest.get('magic')!r}")
    if manifest.get("version") != BUNDLE_VERSION:
        raise SchemaError(f"unsupported bundle version {manifest.get('version')!r}")

    try:
        roi = Polygon(
            exterior=_ring_from_json(manifest["roi"]["exterior"]),
            holes=tuple(_ring_from_json(h) for h in manifest["roi"]["holes"]),
        )
        window = TimeWindow(*manifest["time_window"])
        workspace = Workspace(roi=roi, time_window=window, rng_seed=manifest["rng_seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"corrupt workspace manifest: {exc}") from exc

    for name, fname in manifest.get("rasters", {}).items():
        workspace.rasters[name] = read_gridr(root / "rasters" / fname)
    for name, fname in manifest.get("vectors", {}).items():
        with open(root / "vectors" / fname, encoding="utf-8") as f:
            workspace.vectors[name] = layer_from_geojson(json.load(f))
    for artifact_id in manifest.get("artifacts", []):
        with open(root / "artifacts" / f"{_safe(artifact_id)}.json", encoding="utf-8") as f:
            artifact = Artifact.from_json(json.load(f))
        workspace.artifacts[artifact.id] = artifact
    return workspace


def workspaces_equal(a: Workspace, b: Workspace) -> bool:
    """Field-for-field equality, bit-exact on raster payloads."""
    if a.rng_seed != b.rng_seed or a.time_window != b.time_window or a.roi != b.roi:
        return False
    if sorted(a.rasters) != sorted(b.rasters) or sorted(a.vectors) != sorted(b.vectors):
        return False
    if any(a.rasters[n] != b.rasters[n] for n in a.rasters):
        return False
    for name in a.vectors:
        if layer_to_geojson(a.vectors[name]) != layer_to_geojson(b.vectors[name]):
            return False
    if sorted(a.artifacts) != sorted(b.artifacts):
        return False
    return all(a.artifacts[i].to_json() == b.artifacts[i].to_json() for i in a.artifacts)
