import numpy as np
import pytest

from geoagency.bench import (
    CROPLAND_LAYER,
    Phenology,
    WorldSpec,
    generate_world,
    phenology_for_class,
    world_digest,
)
from geoagency.core import TimeWindow
from geoagency.embeddings import SyntheticProvider
from geoagency.errors import SpecInvalid


def test_zero_noise_embeddings_equal_prototypes():
    spec = WorldSpec(width=8, height=8, n_classes=3, voronoi_sites=6, noise_sigma=0.0)
    ws, ref = generate_world(spec, seed=3)
    labels = ref.read_labels("worldgen")
    matrix = SyntheticProvider(ws.rasters["embeddings"]).matrix()
    for k in range(3):
        rows = matrix[labels == k]
        assert np.allclose(rows, rows[0])


def test_same_seed_identical_worlds():
    spec = WorldSpec(width=16, height=16, n_classes=2)
    w1, _ = generate_world(spec, seed=11)
    w2, _ = generate_world(spec, seed=11)
    assert world_digest(w1) == world_digest(w2)
    w3, _ = generate_world(spec, seed=12)
    assert world_digest(w1) != world_digest(w3)


def test_nearest_prototype_accuracy():
    spec = WorldSpec(width=32, height=32, n_classes=2, noise_sigma=0.1)
    ws, ref = generate_world(spec, seed=5)
    labels = ref.read_labels("worldgen")
    matrix = SyntheticProvider(ws.rasters["embeddings"]).matrix()
    prototypes = np.stack([matrix[labels == k].mean(axis=0) for k in range(2)])
    d = np.linalg.norm(matrix[:, None, :] - prototypes[None, :, :], axis=2)
    accuracy = float(np.mean(np.argmin(d, axis=1) == labels))
    assert accuracy >= 0.99


def test_every_class_present():
    spec = WorldSpec(width=16, height=16, n_classes=4, voronoi_sites=8)
    _, ref = generate_world(spec, seed=1)
    labels = ref.read_labels("worldgen")
    assert set(np.unique(labels)) == {0, 1, 2, 3}


def test_prototypes_pairwise_separated():
    spec = WorldSpec(width=8, height=8, n_classes=8, voronoi_sites=16, noise_sigma=0.0)
    ws, ref = generate_world(spec, seed=2)
    labels = ref.read_labels("worldgen")
    matrix = SyntheticProvider(ws.rasters["embeddings"]).matrix()
    protos = np.stack([matrix[labels == k][0] for k in range(8)])
    protos /= np.linalg.norm(protos, axis=1, keepdims=True)
    cosines = protos @ protos.T
    np.fill_diagonal(cosines, 0.0)
    assert np.max(np.abs(cosines)) < 0.5


def test_ndvi_stack_matches_phenology():
    spec = WorldSpec(width=8, height=8, n_classes=2, n_dates=4, window=TimeWindow(0, 1000))
    ws, ref = generate_world(spec, seed=9)
    labels = ref.read_labels("worldgen")
    raster = ws.rasters["s2_t1"]
    red, nir = raster.bands["red"], raster.bands["nir"]
    ndvi = (nir - red) / (nir + red)
    curve = phenology_for_class(int(labels[0]), 2)
    assert ndvi[0] == pytest.approx(curve.value(raster.timestamp, spec.window), abs=1e-12)


def test_phenology_peaks_distinct():
    curves = [phenology_for_class(k, 3) for k in range(3)]
    peaks = [c.peak for c in curves]
    assert len(set(peaks)) == 3


def test_temporal_alteration_flips_quadrant():
    spec = WorldSpec(width=16, height=16, n_classes=2, temporal_alteration=True)
    ws, ref = generate_world(spec, seed=4)
    assert "embeddings_t2" in ws.rasters
    t1 = ref.read_labels("worldgen")
    t2 = ref.read_labels_t2("worldgen")
    changed = np.nonzero(t1 != t2)[0]
    cols = changed % 16
    rows = changed // 16
    assert np.all(cols >= 8) and np.all(rows >= 8)
    assert changed.size == 64


def test_cropland_mask_and_buildings():
    spec = WorldSpec(
        width=16, height=16, n_classes=3, crop_classes=("class0", "class1"),
        temporal_alteration=True, n_buildings=8,
    )
    ws, ref = generate_world(spec, seed=6)
    labels = ref.read_labels("worldgen")
    mask = ws.rasters[CROPLAND_LAYER].band("mask")
    assert np.array_equal(mask == 1.0, np.isin(labels, [0, 1]))
    layer = ws.vectors["buildings"]
    assert len(layer) == 8
    destroyed = ref.read_destroyed_buildings("worldgen")
    assert all(b.startswith("bldg_") for b in destroyed)


def test_invalid_specs_rejected():
    with pytest.raises(SpecInvalid):
        WorldSpec(n_classes=1)
    with pytest.raises(SpecInvalid):
        WorldSpec(n_classes=4, voronoi_sites=2)
    with pytest.raises(SpecInvalid):
        WorldSpec(width=1)


def test_phenology_curve_shape():
    window = TimeWindow(0, 100)
    curve = Phenology(base=0.2, amplitude=0.5, peak=0.5, width=0.15)
    assert curve.value(50, window) == pytest.approx(0.7, abs=1e-12)
    assert curve.value(0, window) < 0.25
