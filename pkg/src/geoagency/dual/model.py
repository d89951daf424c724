"""Cheap scalable learners over embeddings.

The default is a nearest-centroid classifier with a softmax over negative
centroid distances: deterministic, dependency-free, and analytically
testable. A random-forest implementation can slot in behind the same
interface if calibration ever matters.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..errors import SingleClass


class LightweightModel:
    """Interface: fit on (vector, class) pairs, predict per-class probabilities."""

    def fit(self, examples: list[tuple[np.ndarray, str]]) -> None:
        raise NotImplementedError

    def predict_proba(self, x: np.ndarray) -> dict[str, float]:
        raise NotImplementedError

    def predict_proba_batch(self, xs: np.ndarray) -> tuple[list[str], np.ndarray]:
        raise NotImplementedError


class NearestCentroidModel(LightweightModel):
    def __init__(self, temperature: float = 1.0):
        self.temperature = temperature
        self.classes: list[str] = []
        self.centroids: np.ndarray | None = None

    def fit(self, examples: list[tuple[np.ndarray, str]]) -> None:
        if not examples:
            raise SingleClass("no training examples")
        # Sort before averaging: summation order fixed, so the fit result is
        # invariant under permutation of the training set.
        keyed = sorted(
            ((label, np.asarray(vec, dtype=np.float64).reshape(-1)) for vec, label in examples),
            key=lambda kv: (kv[0], kv[1].tobytes()),
        )
        classes = sorted({label for label, _ in keyed})
        if len(classes) < 2:
            raise SingleClass(f"need >= 2 classes, got {classes}")
        self.classes = classes
        self.centroids = np.stack(
            [
                np.mean([v for label, v in keyed if label == cls], axis=0)
                for cls in classes
            ]
        )

    def training_digest(self, examples: list[tuple[np.ndarray, str]]) -> str:
        keyed = sorted(
            (label, np.asarray(vec, dtype=np.float64).tobytes()) for vec, label in examples
        )
        h = hashlib.sha256()
        for label, blob in keyed:
            h.update(label.encode("utf-8"))
            h.update(blob)
        return h.hexdigest()[:16]

    def _softmax_neg_dist(self, dists: np.ndarray) -> np.ndarray:
        scaled = -dists / self.temperature
        scaled -= scaled.max(axis=-1, keepdims=True)
        e = np.exp(scaled)
        return e / e.sum(axis=-1, keepdims=True)

    def predict_proba(self, x: np.ndarray) -> dict[str, float]:
        classes, probs = self.predict_proba_batch(
            np.asarray(x, dtype=np.float64).reshape(1, -1)
        )
        return dict(zip(classes, probs[0].tolist()))

    def predict_proba_batch(self, xs: np.ndarray) -> tuple[list[str], np.ndarray]:
        if self.centroids is None:
            raise SingleClass("model is not fitted")
        xs = np.asarray(xs, dtype=np.float64)
        dists = np.linalg.norm(xs[:, None, :] - self.centroids[None, :, :], axis=2)
        return self.classes, self._softmax_neg_dist(dists)
