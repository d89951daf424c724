from .loop import (
    CONFIDENCE_BAND,
    SURFACE_BAND_PREFIX,
    LoopState,
    fit_and_predict,
    surface_argmax,
    surface_confident_cells,
)
from .model import LightweightModel, NearestCentroidModel

__all__ = [
    "CONFIDENCE_BAND", "SURFACE_BAND_PREFIX", "LoopState", "fit_and_predict",
    "surface_argmax", "surface_confident_cells",
    "LightweightModel", "NearestCentroidModel",
]
