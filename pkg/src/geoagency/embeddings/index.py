"""Exact cosine k-NN over fixed-dimension embedding vectors.

Desk scale (<= 1e5 items) keeps brute-force scoring fast, so the index is
a sorted id list plus one dense matrix; results are exactly the brute-force
ranking with ties broken by ascending id.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import DimensionMismatch, EmptyIndex, KTooLarge, ZeroVector

EMBD_MAGIC = "EMBD"


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for all-zero vectors")
    return float(np.dot(a, b) / (na * nb))


class EmbeddingIndex:
    """Immutable after build; safe for unlimited concurrent readers."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            self.ids: list[str] = []
            self.matrix = np.zeros((0, 0))
            self.dim = 0
            return
        self.ids = sorted(vectors)
        dims = {np.asarray(v).reshape(-1).shape[0] for v in vectors.values()}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed dimensions in index: {sorted(dims)}")
        self.dim = dims.pop()
        self.matrix = np.stack(
            [np.asarray(vectors[i], dtype=np.float64).reshape(-1) for i in self.ids]
        )
        self._norms = np.linalg.norm(self.matrix, axis=1)

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, item_id: str) -> bool:
        return item_id in set(self.ids)

    def vector(self, item_id: str) -> np.ndarray:
        try:
            pos = self.ids.index(item_id)
        except ValueError:
            raise EmptyIndex(f"id {item_id!r} not in index") from None
        return self.matrix[pos]

    def subset(self, keep_ids) -> "EmbeddingIndex":
        keep = set(keep_ids)
        return EmbeddingIndex(
            {i: self.matrix[pos] for pos, i in enumerate(self.ids) if i in keep}
        )

    def knn(self, query: np.ndarray, k: int) -> list[tuple[str, float]]:
        if len(self.ids) == 0:
            raise EmptyIndex("knn on empty index")
        if k < 1:
            raise KTooLarge(f"k must be >= 1, got {k}")
        q = np.asarray(query, dtype=np.float64).reshape(-1)
        if q.shape[0] != self.dim:
            raise DimensionMismatch(f"query dim {q.shape[0]} != index dim {self.dim}")
        qn = float(np.linalg.norm(q))
        if qn == 0.0:
            raise ZeroVector("knn query is all-zero")
        if np.any(self._norms == 0.0):
            raise ZeroVector("index contains an all-zero vector")
        scores = (self.matrix @ q) / (self._norms * qn)
        order = sorted(range(len(self.ids)), key=lambda i: (-scores[i], self.ids[i]))
        return [(self.ids[i], float(scores[i])) for i in order[:k]]


def diversity_sample(index: EmbeddingIndex, k: int) -> list[str]:
    """Greedy farthest-point (k-center) pick in Euclidean distance.

    First pick: the point farthest from the index mean; each later pick
    maximizes the minimum distance to already-picked points. All ties go
    to the lowest id (rows are id-sorted, argmax returns the first max).
    """
    n = len(index)
    if n == 0:
        raise EmptyIndex("diversity sample on empty index")
    if not (1 <= k <= n):
        raise KTooLarge(f"k={k} outside [1, {n}]")
    x = index.matrix
    mean = x.mean(axis=0)
    dist_to_mean = np.linalg.norm(x - mean, axis=1)
    picked = [int(np.argmax(dist_to_mean))]
    min_dist = np.linalg.norm(x - x[picked[0]], axis=1)
    while len(picked) < k:
        nxt = int(np.argmax(min_dist))
        picked.append(nxt)
        min_dist = np.minimum(min_dist, np.linalg.norm(x - x[nxt], axis=1))
    return [index.ids[i] for i in picked]


def save_embeddings(index: EmbeddingIndex, path) -> None:
    header = {"magic": EMBD_MAGIC, "dim": index.dim, "count": len(index)}
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8"))
        f.write(b"\n")
        for pos, item_id in enumerate(index.ids):
            raw = item_id.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
            f.write(np.ascontiguousarray(index.matrix[pos], dtype="<f8").tobytes())


def load_embeddings(path) -> EmbeddingIndex:
    from ..errors import SchemaError

    with open(path, "rb") as f:
        header = json.loads(f.readline().decode("utf-8"))
        if header.get("magic") != EMBD_MAGIC:
            raise SchemaError(f"bad embeddings magic {header.get('magic')!r}")
        dim, count = header["dim"], header["count"]
        vectors = {}
        for _ in range(count):
            (id_len,) = struct.unpack("<I", f.read(4))
            item_id = f.read(id_len).decode("utf-8")
            vectors[item_id] = np.frombuffer(f.read(dim * 8), dtype="<f8").astype(np.float64)
    return EmbeddingIndex(vectors)
