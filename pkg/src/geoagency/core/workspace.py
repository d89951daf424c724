"""The workspace: named layers + ROI + time window + artifact registry.

Single-writer contract: all mutations happen through one command stream
(the session); readers work on snapshots. Nothing here spawns threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SchemaError
from .artifacts import Artifact
from .geometry import Polygon, TimeWindow, polygon_intersects_bbox
from .raster import GridRaster
from .vector import VectorLayer


@dataclass
class Workspace:
    roi: Polygon
    time_window: TimeWindow
    rng_seed: int
    rasters: dict[str, GridRaster] = field(default_factory=dict)
    vectors: dict[str, VectorLayer] = field(default_factory=dict)
    artifacts: dict[str, Artifact] = field(default_factory=dict)

    def add_raster(self, name: str, raster: GridRaster) -> None:
        if not polygon_intersects_bbox(self.roi, raster.extent()):
            raise SchemaError(f"raster {name!r} extent does not intersect the ROI")
        self.rasters[name] = raster

    def add_vector(self, layer: VectorLayer) -> None:
        self.vectors[layer.name] = layer

    def raster(self, name: str) -> GridRaster:
        if name not in self.rasters:
            raise SchemaError(f"no raster layer {name!r}; have {sorted(self.rasters)}")
        return self.rasters[name]

    def vector(self, name: str) -> VectorLayer:
        if name not in self.vectors:
            raise SchemaError(f"no vector layer {name!r}; have {sorted(self.vectors)}")
        return self.vectors[name]

    def register_artifact(self, artifact: Artifact) -> None:
        if artifact.id in self.artifacts:
            raise SchemaError(f"artifact id {artifact.id!r} already registered")
        for input_id in artifact.provenance.input_artifact_ids:
            if input_id not in self.artifacts:
                raise SchemaError(
                    f"artifact {artifact.id!r} references unknown input {input_id!r}"
                )
        # Inputs must pre-exist, so provenance chains are acyclic by construction.
        self.artifacts[artifact.id] = artifact

    def snapshot(self) -> "Workspace":
        """Immutable-by-convention copy for concurrent readers."""
        return Workspace(
            roi=self.roi,
            time_window=self.time_window,
            rng_seed=self.rng_seed,
            rasters={k: v.copy() for k, v in self.rasters.items()},
            vectors={k: v.copy() for k, v in self.vectors.items()},
            artifacts=dict(self.artifacts),
        )
