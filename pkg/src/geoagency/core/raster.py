"""Minimal in-memory grid raster and the GRIDR v1 container format.

GRIDR v1 on disk: one JSON header line, then per-band row-major
float64 little-endian cell values in header band order. Row 0 is the
bottom row (adjacent to the lower-left origin); cell index = row * width + col.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaError
from .geometry import BBox, GeoPoint, TimeStamp

GRIDR_MAGIC = "GRIDR"
GRIDR_VERSION = 1
DEFAULT_NODATA = -9999.0


@dataclass
class GridRaster:
    origin: GeoPoint  # lower-left corner
    cell_size: float
    width: int
    height: int
    bands: dict[str, np.ndarray] = field(default_factory=dict)  # name -> (h*w,) float64
    nodata: float = DEFAULT_NODATA
    timestamp: TimeStamp | None = None

    def __post_init__(self):
        if self.cell_size <= 0:
            raise SchemaError(f"cell_size must be > 0, got {self.cell_size}")
        if self.width < 1 or self.height < 1:
            raise SchemaError("raster must have at least one cell")
        fixed = {}
        for name, arr in self.bands.items():
            a = np.asarray(arr, dtype=np.float64).reshape(-1)
            if a.size != self.n_cells:
                raise SchemaError(
                    f"band {name!r} has {a.size} values, expected {self.n_cells}"
                )
            fixed[name] = a
        self.bands = fixed

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def band_names(self) -> list[str]:
        return list(self.bands.keys())

    def band(self, name: str) -> np.ndarray:
        if name not in self.bands:
            raise SchemaError(f"no band {name!r}; have {self.band_names}")
        return self.bands[name]

    def extent(self) -> BBox:
        return BBox(
            self.origin.x,
            self.origin.y,
            self.origin.x + self.width * self.cell_size,
            self.origin.y + self.height * self.cell_size,
        )

    def cell_center(self, idx: int) -> tuple[float, float]:
        row, col = divmod(idx, self.width)
        return (
            self.origin.x + (col + 0.5) * self.cell_size,
            self.origin.y + (row + 0.5) * self.cell_size,
        )

    def cell_bbox(self, idx: int) -> BBox:
        row, col = divmod(idx, self.width)
        x0 = self.origin.x + col * self.cell_size
        y0 = self.origin.y + row * self.cell_size
        return BBox(x0, y0, x0 + self.cell_size, y0 + self.cell_size)

    def cell_centers(self) -> np.ndarray:
        """(n_cells, 2) array of centers in index order."""
        cols = np.arange(self.n_cells) % self.width
        rows = np.arange(self.n_cells) // self.width
        xs = self.origin.x + (cols + 0.5) * self.cell_size
        ys = self.origin.y + (rows + 0.5) * self.cell_size
        return np.column_stack([xs, ys])

    def same_grid(self, other: "GridRaster") -> bool:
        return (
            self.origin == other.origin
            and self.cell_size == other.cell_size
            and self.width == other.width
            and self.height == other.height
        )

    def copy(self) -> "GridRaster":
        return GridRaster(
            origin=self.origin,
            cell_size=self.cell_size,
            width=self.width,
            height=self.height,
            bands={k: v.copy() for k, v in self.bands.items()},
            nodata=self.nodata,
            timestamp=self.timestamp,
        )

    def __eq__(self, other) -> bool:  # bit-exact, used by round-trip tests
        if not isinstance(other, GridRaster):
            return NotImplemented
        if not self.same_grid(other):
            return False
        if self.timestamp != other.timestamp or self.band_names != other.band_names:
            return False
        if self.nodata.hex() != float(other.nodata).hex():
            return False
        return all(
            self.bands[n].tobytes() == other.bands[n].tobytes() for n in self.bands
        )


def write_gridr(raster: GridRaster, path) -> None:
    if not math.isfinite(raster.nodata):
        raise SchemaError("GRIDR nodata must be finite (JSON header)")
    header = {
        "magic": GRIDR_MAGIC,
        "version": GRIDR_VERSION,
        "origin": [raster.origin.x, raster.origin.y],
        "cell_size": raster.cell_size,
        "width": raster.width,
        "height": raster.height,
        "bands": raster.band_names,
        "nodata": raster.nodata,
        "timestamp": raster.timestamp,
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8"))
        f.write(b"\n")
        for name in raster.band_names:
            f.write(np.ascontiguousarray(raster.bands[name], dtype="<f8").tobytes())


def read_gridr(path) -> GridRaster:
    with open(path, "rb") as f:
        header_line = f.readline()
        blob = f.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"unreadable GRIDR header: {exc}") from exc
    if header.get("magic") != GRIDR_MAGIC:
        raise SchemaError(f"bad magic {header.get('magic')!r}")
    if header.get("version") != GRIDR_VERSION:
        raise SchemaError(f"unsupported GRIDR version {header.get('version')!r}")
    width, height = header["width"], header["height"]
    names = header["bands"]
    n = width * height
    expected = n * 8 * len(names)
    if len(blob) != expected:
        raise SchemaError(f"payload is {len(blob)} bytes, expected {expected}")
    bands = {}
    for i, name in enumerate(names):
        bands[name] = np.frombuffer(
            blob[i * n * 8 : (i + 1) * n * 8], dtype="<f8"
        ).astype(np.float64)
    return GridRaster(
        origin=GeoPoint(header["origin"][0], header["origin"][1]),
        cell_size=header["cell_size"],
        width=width,
        height=height,
        bands=bands,
        nodata=header["nodata"],
        timestamp=header["timestamp"],
    )
