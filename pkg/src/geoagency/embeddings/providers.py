"""Embedding providers.

A provider maps a grid cell to a fixed-length vector, deterministically
under the workspace seed. The synthetic provider reads precomputed
per-cell vectors from a multi-band raster laid down by the world
generator; a real foundation-model provider would implement the same
two methods. Location-level priors are left as an extension point.
"""

from __future__ import annotations

import numpy as np

from ..core.raster import GridRaster
from ..errors import DimensionMismatch, SchemaError

DEFAULT_DIM = 32
EMBEDDING_BAND_PREFIX = "e"


def embedding_band_names(dim: int) -> list[str]:
    return [f"{EMBEDDING_BAND_PREFIX}{i:02d}" for i in range(dim)]


def cell_id(index: int) -> str:
    # Zero-padded so lexicographic id order == row-major cell order.
    return f"cell_{index:06d}"


def cell_index(item_id: str) -> int:
    if not item_id.startswith("cell_"):
        raise SchemaError(f"not a cell id: {item_id!r}")
    return int(item_id.removeprefix("cell_"))


class EmbeddingProvider:
    """Interface: deterministic cell -> vector mapping."""

    name: str = "abstract"
    dim: int = DEFAULT_DIM

    def embed(self, index: int) -> np.ndarray:
        raise NotImplementedError

    def embed_all(self) -> dict[str, np.ndarray]:
        raise NotImplementedError


class SyntheticProvider(EmbeddingProvider):
    """Reads per-cell vectors from an embedding raster (bands e00..eNN)."""

    name = "synthetic"

    def __init__(self, raster: GridRaster):
        names = embedding_band_names(len(raster.bands))
        if raster.band_names != names:
            raise DimensionMismatch(
                f"raster bands {raster.band_names[:3]}... do not look like embedding bands"
            )
        self.dim = len(names)
        self._matrix = np.stack([raster.bands[n] for n in names], axis=1)
        self._n_cells = raster.n_cells

    def embed(self, index: int) -> np.ndarray:
        return self._matrix[index]

    def embed_all(self) -> dict[str, np.ndarray]:
        return {cell_id(i): self._matrix[i] for i in range(self._n_cells)}

    def matrix(self) -> np.ndarray:
        return self._matrix
