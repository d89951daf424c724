"""Attach evidence attributes to a feature.

Merges computed and external attributes under namespaced keys
("computed.*", "shape.*", "ext.<source>"). Only feature.attributes
changes; geometry, label, and status are never touched here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core.attributes import AttributeValue
from ..core.vector import Feature
from ..core.workspace import Workspace
from ..errors import MissingSourceLayer
from .compute import series_attribute, shape_attributes, zonal_attributes
from .external import ExternalSourceStub


@dataclass(frozen=True)
class AttributionRequest:
    feature_id: str
    shape_metrics: bool = False
    zonal: tuple[tuple[str, str, str], ...] = ()  # (raster layer, band, prefix)
    series: tuple[tuple[str, str, str], ...] = ()  # (layer name prefix, band, series name)
    external: tuple[str, ...] = ()  # source names


def _dated_stack(workspace: Workspace, layer_prefix: str):
    stack = [
        raster
        for name, raster in workspace.rasters.items()
        if name.startswith(layer_prefix) and raster.timestamp is not None
    ]
    stack.sort(key=lambda r: r.timestamp)
    return stack


def compute_attributes(
    request: AttributionRequest,
    feature: Feature,
    workspace: Workspace,
    sources: dict[str, ExternalSourceStub] | None = None,
) -> dict[str, AttributeValue]:
    out: dict[str, AttributeValue] = {}
    if request.shape_metrics:
        out.update(shape_attributes(feature.geometry))
    for layer, band, prefix in request.zonal:
        if layer not in workspace.rasters:
            raise MissingSourceLayer(f"no raster layer {layer!r} for zonal attributes")
        out.update(zonal_attributes(workspace.rasters[layer], band, feature.geometry, prefix))
    for layer_prefix, band, name in request.series:
        stack = _dated_stack(workspace, layer_prefix)
        if not stack:
            raise MissingSourceLayer(f"no dated rasters matching {layer_prefix!r}")
        out.update(series_attribute(stack, band, feature.geometry, name))
    for source_name in request.external:
        if sources is None or source_name not in sources:
            raise MissingSourceLayer(f"external source {source_name!r} not configured")
        value = sources[source_name].lookup(feature.geometry, workspace.time_window)
        out[f"ext.{source_name}"] = value
    return out


def attach_attributes(
    request: AttributionRequest,
    feature: Feature,
    workspace: Workspace,
    sources: dict[str, ExternalSourceStub] | None = None,
) -> Feature:
    """Merge attributes into the feature in place; existing keys overwritten."""
    computed = compute_attributes(request, feature, workspace, sources)
    feature.attributes.update(computed)
    return feature
