"""Guided propagation: expand seed labels into ranked candidates.

Score = max cosine similarity to positive seeds, minus max cosine
similarity to negative seeds when negatives are present. Max-aggregation
suits small multi-modal seed sets (one class, several looks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embeddings import EmbeddingIndex
from ..errors import EmptyPool, EmptySeedSet


@dataclass(frozen=True)
class SeedSet:
    label: str
    positive_ids: tuple[str, ...]
    negative_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.positive_ids:
            raise EmptySeedSet("seed set needs at least one positive example")
        object.__setattr__(self, "positive_ids", tuple(self.positive_ids))
        object.__setattr__(self, "negative_ids", tuple(self.negative_ids))


@dataclass(frozen=True)
class Candidate:
    item_id: str
    score: float
    rank: int

    def to_json(self) -> dict:
        return {"item_id": self.item_id, "score": self.score, "rank": self.rank}


def _max_cosine(matrix: np.ndarray, norms: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    seed_norms = np.linalg.norm(seeds, axis=1)
    sims = (matrix @ seeds.T) / np.outer(norms, seed_norms)
    return sims.max(axis=1)


def propagate(
    seeds: SeedSet,
    index: EmbeddingIndex,
    pool_ids: list[str],
    k: int,
    exclude_ids: set[str] | None = None,
) -> list[Candidate]:
    """Top-k pool items most similar to the seeds, ties by ascending id."""
    exclude = set(exclude_ids or set())
    exclude.update(seeds.positive_ids)
    exclude.update(seeds.negative_ids)
    pool = [i for i in pool_ids if i not in exclude]
    if not pool:
        raise EmptyPool("candidate pool is empty after exclusions")

    pos = np.stack([index.vector(i) for i in seeds.positive_ids])
    pool_pos = {item_id: n for n, item_id in enumerate(index.ids)}
    rows = [pool_pos[i] for i in pool]
    matrix = index.matrix[rows]
    norms = np.linalg.norm(matrix, axis=1)

    scores = _max_cosine(matrix, norms, pos)
    if seeds.negative_ids:
        neg = np.stack([index.vector(i) for i in seeds.negative_ids])
        scores = scores - _max_cosine(matrix, norms, neg)

    order = sorted(range(len(pool)), key=lambda n: (-scores[n], pool[n]))
    return [
        Candidate(item_id=pool[n], score=float(scores[n]), rank=r + 1)
        for r, n in enumerate(order[:k])
    ]
