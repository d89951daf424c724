from .attach import AttributionRequest, attach_attributes, compute_attributes
from .compute import compactness, series_attribute, shape_attributes, zonal_attributes
from .external import ExternalSourceStub, FixtureSource, default_fixture_dir, geometry_digest

__all__ = [
    "AttributionRequest", "attach_attributes", "compute_attributes",
    "compactness", "series_attribute", "shape_attributes", "zonal_attributes",
    "ExternalSourceStub", "FixtureSource", "default_fixture_dir", "geometry_digest",
]
