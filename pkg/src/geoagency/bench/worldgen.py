"""Synthetic desk-scale worlds: Voronoi class maps, per-class embedding
prototypes with seeded noise, phenology-driven NDVI stacks, cropland masks,
and (for change tasks) a quadrant class flip at a second date plus building
footprints.

Reference labels are sealed behind evaluator-only access; everything else
lands in an ordinary workspace.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..core.geometry import BBox, GeoPoint, Polygon, TimeWindow, bbox_to_polygon
from ..core.raster import GridRaster
from ..core.vector import Feature, LabelStatus, VectorLayer
from ..core.workspace import Workspace
from ..embeddings import embedding_band_names
from ..errors import SpecInvalid
from .evaluator import SealedReference

BUILDINGS_LAYER = "buildings"
CROPLAND_LAYER = "cropland"


@dataclass(frozen=True)
class Phenology:
    base: float = 0.2
    amplitude: float = 0.5
    peak: float = 0.5  # fraction of the time window
    width: float = 0.15  # fraction of the time window

    def value(self, t: float, window: TimeWindow) -> float:
        span = max(1, window.end - window.start)
        x = (t - window.start) / span
        return self.base + self.amplitude * float(
            np.exp(-((x - self.peak) ** 2) / (2.0 * self.width**2))
        )


@dataclass(frozen=True)
class WorldSpec:
    width: int = 32
    height: int = 32
    n_classes: int = 2
    voronoi_sites: int = 12
    embedding_dim: int = 32
    noise_sigma: float = 0.1
    class_names: tuple[str, ...] = ()
    crop_classes: tuple[str, ...] = ()  # classes counted as cropland
    n_dates: int = 6
    window: TimeWindow = field(default_factory=lambda: TimeWindow(0, 10_000))
    temporal_alteration: bool = False
    n_buildings: int = 0
    cell_size: float = 1.0

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise SpecInvalid("world must be at least 2x2")
        if self.n_classes < 2:
            raise SpecInvalid("need >= 2 classes")
        if self.voronoi_sites < self.n_classes:
            raise SpecInvalid("need at least one site per class")
        if not (0 <= self.noise_sigma):
            raise SpecInvalid("noise sigma must be >= 0")
        names = self.class_names or tuple(f"class{k}" for k in range(self.n_classes))
        if len(names) != self.n_classes:
            raise SpecInvalid("class_names length must match n_classes")
        object.__setattr__(self, "class_names", tuple(names))
        object.__setattr__(self, "crop_classes", tuple(self.crop_classes))

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "n_classes": self.n_classes,
            "voronoi_sites": self.voronoi_sites,
            "embedding_dim": self.embedding_dim,
            "noise_sigma": self.noise_sigma,
            "class_names": list(self.class_names),
            "crop_classes": list(self.crop_classes),
            "n_dates": self.n_dates,
            "window": [self.window.start, self.window.end],
            "temporal_alteration": self.temporal_alteration,
            "n_buildings": self.n_buildings,
            "cell_size": self.cell_size,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WorldSpec":
        obj = dict(obj)
        if "window" in obj:
            obj["window"] = TimeWindow(*obj["window"])
        for key in ("class_names", "crop_classes"):
            if key in obj:
                obj[key] = tuple(obj[key])
        return cls(**obj)


def _prototypes(rng: np.random.Generator, k: int, dim: int) -> np.ndarray:
    """K unit vectors with pairwise cosine < 0.5, by seeded rejection."""
    for _ in range(1000):
        vecs = rng.standard_normal((k, dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        cosines = vecs @ vecs.T
        np.fill_diagonal(cosines, 0.0)
        if np.all(np.abs(cosines) < 0.5):
            return vecs
    raise SpecInvalid(f"could not draw {k} prototypes with pairwise cosine < 0.5 in dim {dim}")


def _voronoi_labels(rng: np.random.Generator, spec: WorldSpec) -> np.ndarray:
    sites = np.column_stack(
        [
            rng.uniform(0, spec.width, size=spec.voronoi_sites),
            rng.uniform(0, spec.height, size=spec.voronoi_sites),
        ]
    )
    # First K sites cover every class; the rest draw at random.
    site_class = np.concatenate(
        [
            np.arange(spec.n_classes),
            rng.integers(0, spec.n_classes, size=spec.voronoi_sites - spec.n_classes),
        ]
    )
    cols = np.arange(spec.width * spec.height) % spec.width
    rows = np.arange(spec.width * spec.height) // spec.width
    centers = np.column_stack([cols + 0.5, rows + 0.5])
    d2 = ((centers[:, None, :] - sites[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)  # ties fall to the lowest site index
    return site_class[nearest]


def _embedding_raster(
    labels: np.ndarray,
    prototypes: np.ndarray,
    rng: np.random.Generator,
    spec: WorldSpec,
    timestamp: int,
) -> GridRaster:
    noise = rng.standard_normal((labels.size, spec.embedding_dim)) * spec.noise_sigma
    vectors = prototypes[labels] + noise
    names = embedding_band_names(spec.embedding_dim)
    return GridRaster(
        origin=GeoPoint(0.0, 0.0),
        cell_size=spec.cell_size,
        width=spec.width,
        height=spec.height,
        bands={n: vectors[:, k].copy() for k, n in enumerate(names)},
        timestamp=timestamp,
    )


def _ndvi_to_bands(ndvi: np.ndarray) -> dict[str, np.ndarray]:
    # red + nir = 1 per cell, so (nir-red)/(nir+red) reproduces ndvi exactly.
    return {"red": (1.0 - ndvi) / 2.0, "nir": (1.0 + ndvi) / 2.0}


def phenology_for_class(k: int, n_classes: int) -> Phenology:
    """Staggered peaks guarantee distinct phenology per class."""
    return Phenology(peak=0.25 + 0.5 * k / max(1, n_classes - 1))


def _buildings(
    rng: np.random.Generator, spec: WorldSpec, flipped: np.ndarray
) -> tuple[VectorLayer, tuple[str, ...]]:
    layer = VectorLayer(name=BUILDINGS_LAYER)
    destroyed = []
    half = spec.n_buildings // 2
    for b in range(spec.n_buildings):
        in_quadrant = b < half
        if in_quadrant:
            col = int(rng.integers(spec.width // 2, spec.width - 1))
            row = int(rng.integers(spec.height // 2, spec.height - 1))
        else:
            col = int(rng.integers(0, spec.width // 2 - 1))
            row = int(rng.integers(0, spec.height // 2 - 1))
        x0, y0 = col * spec.cell_size, row * spec.cell_size
        side = 2 * spec.cell_size
        footprint = bbox_to_polygon(BBox(x0, y0, x0 + side, y0 + side))
        feature = Feature(
            id=f"bldg_{b:03d}",
            geometry=footprint,
            label="building",
            status=LabelStatus.COMMITTED,
        )
        layer.add(feature)
        center_cell = (row * spec.width) + col
        if flipped[center_cell]:
            destroyed.append(feature.id)
    return layer, tuple(destroyed)


def generate_world(spec: WorldSpec, seed: int) -> tuple[Workspace, SealedReference]:
    rng = np.random.default_rng(seed)
    labels = _voronoi_labels(rng, spec)
    prototypes = _prototypes(rng, spec.n_classes, spec.embedding_dim)

    roi = bbox_to_polygon(
        BBox(0.0, 0.0, spec.width * spec.cell_size, spec.height * spec.cell_size)
    )
    workspace = Workspace(roi=roi, time_window=spec.window, rng_seed=seed)
    workspace.add_raster(
        "embeddings", _embedding_raster(labels, prototypes, rng, spec, spec.window.start)
    )

    labels_t2 = None
    flipped = np.zeros(labels.size, dtype=bool)
    if spec.temporal_alteration:
        labels_t2 = labels.copy()
        cols = np.arange(labels.size) % spec.width
        rows = np.arange(labels.size) // spec.width
        quadrant = (cols >= spec.width // 2) & (rows >= spec.height // 2)
        labels_t2[quadrant] = (labels_t2[quadrant] + 1) % spec.n_classes
        flipped = quadrant & (labels_t2 != labels)
        t2 = _embedding_raster(labels_t2, prototypes, rng, spec, spec.window.end)
        workspace.add_raster("embeddings_t2", t2)
        # Change signature: per-cell magnitude of the embedding shift. A
        # one-band feature keeps "changed" unimodal no matter which class
        # pair flipped (the analogue of a backscatter-change intensity).
        t1 = workspace.rasters["embeddings"]
        diff = np.stack(
            [t2.bands[n] - t1.bands[n] for n in t1.band_names], axis=1
        )
        delta = GridRaster(
            origin=t1.origin,
            cell_size=t1.cell_size,
            width=t1.width,
            height=t1.height,
            bands={"e00": np.linalg.norm(diff, axis=1)},
            timestamp=spec.window.end,
        )
        workspace.add_raster("embeddings_delta", delta)

    # NDVI stack: one dated s2 raster per date, driven by class phenology.
    curves = [phenology_for_class(k, spec.n_classes) for k in range(spec.n_classes)]
    dates = np.linspace(spec.window.start, spec.window.end, spec.n_dates).astype(int)
    for i, t in enumerate(dates):
        per_class = np.array([c.value(int(t), spec.window) for c in curves])
        ndvi = per_class[labels]
        workspace.add_raster(
            f"s2_t{i}",
            GridRaster(
                origin=GeoPoint(0.0, 0.0),
                cell_size=spec.cell_size,
                width=spec.width,
                height=spec.height,
                bands=_ndvi_to_bands(ndvi),
                timestamp=int(t),
            ),
        )

    if spec.crop_classes:
        crop_ids = [spec.class_names.index(c) for c in spec.crop_classes]
        mask = np.isin(labels, crop_ids).astype(np.float64)
        workspace.add_raster(
            CROPLAND_LAYER,
            GridRaster(
                origin=GeoPoint(0.0, 0.0),
                cell_size=spec.cell_size,
                width=spec.width,
                height=spec.height,
                bands={"mask": mask},
            ),
        )

    destroyed: tuple[str, ...] = ()
    if spec.n_buildings > 0:
        layer, destroyed = _buildings(rng, spec, flipped)
        workspace.add_vector(layer)
        # The user arrives with a few confirmed destroyed centroids (story
        # inputs); the full destroyed set stays withheld for validation.
        confirmed = VectorLayer(name="confirmed_destroyed")
        for building_id in destroyed[: min(3, len(destroyed))]:
            footprint = layer.get(building_id).geometry
            c = footprint.centroid()
            confirmed.add(
                Feature(
                    id=f"confirmed_{building_id}",
                    geometry=bbox_to_polygon(
                        BBox(
                            c.x - spec.cell_size / 2,
                            c.y - spec.cell_size / 2,
                            c.x + spec.cell_size / 2,
                            c.y + spec.cell_size / 2,
                        )
                    ),
                    label="destroyed",
                    status=LabelStatus.COMMITTED,
                )
            )
        workspace.add_vector(confirmed)

    workspace.add_vector(VectorLayer(name="work"))

    reference = SealedReference(
        labels=labels,
        class_names=list(spec.class_names),
        labels_t2=labels_t2,
        destroyed_building_ids=destroyed,
    )
    return workspace, reference


def world_digest(workspace: Workspace) -> str:
    """Stable content hash over all raster payloads (world identity check)."""
    h = hashlib.sha256()
    for name in sorted(workspace.rasters):
        raster = workspace.rasters[name]
        h.update(name.encode())
        for band in raster.band_names:
            h.update(band.encode())
            h.update(raster.bands[band].tobytes())
    return h.hexdigest()
