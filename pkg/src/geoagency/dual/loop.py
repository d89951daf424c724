"""Dual-modeling loop: expensive labels in, full-ROI probability surface out.

One step fits the lightweight model on current labels, predicts the
masked pool, and ranks the least-confident cells for human review.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.raster import GridRaster
from ..embeddings import EmbeddingIndex, cell_id, cell_index
from ..errors import EmptyPool, SingleClass
from .model import NearestCentroidModel

SURFACE_BAND_PREFIX = "p_"
CONFIDENCE_BAND = "confidence"


@dataclass
class LoopState:
    iteration: int = 0
    labeled_digest: str = ""
    last_surface_artifact: str | None = None
    review_queue: list[str] = field(default_factory=list)


def fit_and_predict(
    examples: list[tuple[np.ndarray, str]],
    index: EmbeddingIndex,
    pool_ids: list[str],
    grid: GridRaster,
    temperature: float = 1.0,
) -> tuple[GridRaster, GridRaster, NearestCentroidModel]:
    """Fit on examples, predict pool cells.

    Returns (probability surface, confidence raster, fitted model). Cells
    outside the pool are nodata in both rasters. Per-cell probabilities over
    unmasked cells sum to 1.
    """
    if not pool_ids:
        raise EmptyPool("no cells to predict")
    labels = {label for _, label in examples}
    if len(labels) < 2:
        raise SingleClass(f"need >= 2 classes, got {sorted(labels)}")

    model = NearestCentroidModel(temperature=temperature)
    model.fit(examples)

    rows = np.array([cell_index(i) for i in pool_ids], dtype=np.int64)
    xs = index.matrix[[index.ids.index(i) for i in pool_ids]]
    classes, probs = model.predict_proba_batch(xs)

    n = grid.n_cells
    nodata = grid.nodata
    bands = {}
    for k, cls in enumerate(classes):
        band = np.full(n, nodata, dtype=np.float64)
        band[rows] = probs[:, k]
        bands[f"{SURFACE_BAND_PREFIX}{cls}"] = band
    confidence = np.full(n, nodata, dtype=np.float64)
    confidence[rows] = probs.max(axis=1)

    surface = GridRaster(
        origin=grid.origin,
        cell_size=grid.cell_size,
        width=grid.width,
        height=grid.height,
        bands=bands,
        nodata=nodata,
        timestamp=grid.timestamp,
    )
    conf_raster = GridRaster(
        origin=grid.origin,
        cell_size=grid.cell_size,
        width=grid.width,
        height=grid.height,
        bands={CONFIDENCE_BAND: confidence},
        nodata=nodata,
        timestamp=grid.timestamp,
    )
    return surface, conf_raster, model


def surface_argmax(surface: GridRaster) -> dict[str, str]:
    """Cell id -> predicted class for every non-nodata cell."""
    class_names = [b.removeprefix(SURFACE_BAND_PREFIX) for b in surface.band_names]
    matrix = np.stack([surface.bands[b] for b in surface.band_names], axis=1)
    valid = np.nonzero(matrix[:, 0] != surface.nodata)[0]
    picks = np.argmax(matrix[valid], axis=1)
    return {cell_id(int(i)): class_names[int(p)] for i, p in zip(valid, picks)}


def surface_confident_cells(
    surface: GridRaster, threshold: float
) -> list[tuple[str, str, float]]:
    """(cell id, argmax class, confidence) for cells at or above threshold."""
    class_names = [b.removeprefix(SURFACE_BAND_PREFIX) for b in surface.band_names]
    matrix = np.stack([surface.bands[b] for b in surface.band_names], axis=1)
    valid = np.nonzero(matrix[:, 0] != surface.nodata)[0]
    out = []
    for i in valid:
        k = int(np.argmax(matrix[i]))
        p = float(matrix[i, k])
        if p >= threshold:
            out.append((cell_id(int(i)), class_names[k], p))
    return out
