import numpy as np
import pytest

from geoagency.core import BBox, GeoPoint, GridRaster, Polygon, TimeWindow, Workspace


def square(x0=0.0, y0=0.0, side=1.0) -> Polygon:
    return Polygon(
        exterior=(
            GeoPoint(x0, y0),
            GeoPoint(x0 + side, y0),
            GeoPoint(x0 + side, y0 + side),
            GeoPoint(x0, y0 + side),
        )
    )


@pytest.fixture
def unit_square() -> Polygon:
    return square()


def make_raster(width=4, height=4, bands=None, cell_size=1.0, origin=(0.0, 0.0),
                nodata=-9999.0, timestamp=None) -> GridRaster:
    if bands is None:
        bands = {"b1": np.arange(width * height, dtype=np.float64)}
    return GridRaster(
        origin=GeoPoint(*origin),
        cell_size=cell_size,
        width=width,
        height=height,
        bands=bands,
        nodata=nodata,
        timestamp=timestamp,
    )


def make_workspace(side=4.0, seed=7) -> Workspace:
    return Workspace(roi=square(side=side), time_window=TimeWindow(0, 1000), rng_seed=seed)
