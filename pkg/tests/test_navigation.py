import numpy as np
import pytest

from geoagency.core import GeoPoint, GridRaster
from geoagency.embeddings import EmbeddingIndex, cell_id, diversity_sample, embedding_band_names
from geoagency.errors import AllNoData, BudgetZero, NoLayers
from geoagency.navigation import QueryKind, Strategy, build_context, sample_uncertainty, zoom_for_tile

from .conftest import make_workspace


def embedding_raster(width, height, dim=4, seed=0, timestamp=0):
    rng = np.random.default_rng(seed)
    names = embedding_band_names(dim)
    bands = {n: rng.standard_normal(width * height) for n in names}
    return GridRaster(
        origin=GeoPoint(0, 0), cell_size=1.0, width=width, height=height,
        bands=bands, timestamp=timestamp,
    )


def confidence_raster(values, width, height, nodata=-9999.0):
    return GridRaster(
        origin=GeoPoint(0, 0), cell_size=1.0, width=width, height=height,
        bands={"confidence": np.asarray(values, dtype=np.float64)}, nodata=nodata,
    )


def test_explore_equals_diversity_oracle():
    ws = make_workspace(side=16.0)
    raster = embedding_raster(16, 16, seed=3)
    ws.add_raster("embeddings", raster)
    bundle = build_context(QueryKind.EXPLORE, ws, patch_budget=6)
    assert bundle.strategy == Strategy.DIVERSITY
    assert len(bundle.patches) == 6

    vectors = {
        cell_id(i): np.array([raster.bands[b][i] for b in raster.band_names])
        for i in range(raster.n_cells)
    }
    expected = diversity_sample(EmbeddingIndex(vectors), 6)
    assert [p.cell_ids[0] for p in bundle.patches] == expected


def test_coverage_exact_tiling():
    ws = make_workspace(side=8.0)
    ws.add_raster("embeddings", embedding_raster(8, 8))
    bundle = build_context(QueryKind.MAP, ws, patch_budget=100, params={"stride": 4})
    assert bundle.strategy == Strategy.COVERAGE
    assert len(bundle.patches) == 4  # 2x2 tiles of 4x4 cells
    seen = [c for p in bundle.patches for c in p.cell_ids]
    assert sorted(seen) == sorted(cell_id(i) for i in range(64))
    assert len(set(seen)) == 64
    # Union of patch bboxes covers the ROI bbox.
    min_x = min(p.bbox.min_x for p in bundle.patches)
    max_x = max(p.bbox.max_x for p in bundle.patches)
    min_y = min(p.bbox.min_y for p in bundle.patches)
    max_y = max(p.bbox.max_y for p in bundle.patches)
    assert (min_x, min_y, max_x, max_y) == (0.0, 0.0, 8.0, 8.0)


def test_coverage_respects_budget():
    ws = make_workspace(side=8.0)
    ws.add_raster("embeddings", embedding_raster(8, 8))
    bundle = build_context(QueryKind.MAP, ws, patch_budget=3, params={"stride": 4})
    assert len(bundle.patches) == 3


def test_change_detect_concentrates_on_altered_quadrant():
    ws = make_workspace(side=16.0)
    t1 = embedding_raster(16, 16, seed=5, timestamp=0)
    t2 = t1.copy()
    t2.timestamp = 100
    rng = np.random.default_rng(6)
    altered = [r * 16 + c for r in range(8, 16) for c in range(8, 16)]
    for band in t2.band_names:
        t2.bands[band][altered] += rng.standard_normal(len(altered)) * 5.0
    ws.add_raster("embeddings", t1)
    ws.add_raster("embeddings_t2", t2)

    bundle = build_context(QueryKind.CHANGE_DETECT, ws, patch_budget=20)
    assert bundle.strategy == Strategy.TEMPORAL_CONTRAST
    # Brute-force oracle: rank by embedding delta.
    m1 = np.stack([t1.bands[b] for b in t1.band_names], axis=1)
    m2 = np.stack([t2.bands[b] for b in t2.band_names], axis=1)
    delta = np.linalg.norm(m2 - m1, axis=1)
    expected = list(np.argsort(-delta, kind="stable")[:20])
    got = [int(p.cell_ids[0].removeprefix("cell_")) for p in bundle.patches]
    assert got == expected
    in_quadrant = sum(1 for i in got if i in set(altered))
    assert in_quadrant / 20 >= 0.8


def test_uncertainty_uniform_ties_row_major():
    r = confidence_raster([0.5] * 16, 4, 4)
    patches = sample_uncertainty(r, 5)
    assert [p.cell_ids[0] for p in patches] == [cell_id(i) for i in range(5)]


def test_uncertainty_single_low_cell():
    values = [0.9] * 16
    values[11] = 0.01
    patches = sample_uncertainty(confidence_raster(values, 4, 4), 1)
    assert patches[0].cell_ids[0] == cell_id(11)


def test_uncertainty_matches_full_sort():
    rng = np.random.default_rng(8)
    values = rng.random(100)
    r = confidence_raster(values, 10, 10)
    patches = sample_uncertainty(r, 10)
    expected = list(np.argsort(values, kind="stable")[:10])
    got = [int(p.cell_ids[0].removeprefix("cell_")) for p in patches]
    assert got == expected


def test_uncertainty_excludes_nodata_and_all_nodata():
    values = np.full(16, -9999.0)
    with pytest.raises(AllNoData):
        sample_uncertainty(confidence_raster(values, 4, 4), 3)
    values[5] = 0.4
    patches = sample_uncertainty(confidence_raster(values, 4, 4), 3)
    assert [p.cell_ids[0] for p in patches] == [cell_id(5)]


def test_budget_and_layer_errors():
    ws = make_workspace()
    with pytest.raises(NoLayers):
        build_context(QueryKind.EXPLORE, ws, patch_budget=2)
    ws.add_raster("embeddings", embedding_raster(4, 4))
    with pytest.raises(BudgetZero):
        build_context(QueryKind.EXPLORE, ws, patch_budget=0)


def test_determinism():
    ws = make_workspace(side=16.0)
    ws.add_raster("embeddings", embedding_raster(16, 16, seed=5))
    a = build_context(QueryKind.EXPLORE, ws, patch_budget=5)
    b = build_context(QueryKind.EXPLORE, ws, patch_budget=5)
    assert a.to_json() == b.to_json()


def test_zoom_levels():
    from geoagency.core import BBox

    roi = BBox(0, 0, 16, 16)
    assert zoom_for_tile(roi, 16.0) == 0
    assert zoom_for_tile(roi, 8.0) == 1
    assert zoom_for_tile(roi, 1.0) == 4
