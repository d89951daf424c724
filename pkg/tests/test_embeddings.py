import math

import numpy as np
import pytest

from geoagency.embeddings import (
    EmbeddingIndex,
    cosine_similarity,
    diversity_sample,
    load_embeddings,
    save_embeddings,
)
from geoagency.errors import DimensionMismatch, EmptyIndex, KTooLarge, ZeroVector


def test_cosine_identity():
    v = np.array([0.3, -1.2, 4.0])
    assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal():
    assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_cosine_hand_value():
    # dot = 32, |a| = sqrt(14), |b| = sqrt(77)
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([4.0, 5.0, 6.0])
    expected = 32.0 / math.sqrt(14.0 * 77.0)
    assert cosine_similarity(a, b) == pytest.approx(expected, abs=1e-12)
    assert cosine_similarity(a, b) == pytest.approx(0.9746318461970762, abs=1e-12)


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine_similarity(np.zeros(3), np.ones(3))
    with pytest.raises(DimensionMismatch):
        cosine_similarity(np.ones(3), np.ones(4))


def brute_knn(vectors, query, k):
    def cos(a, b):
        return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))

    scored = sorted(vectors.items(), key=lambda kv: (-cos(kv[1], query), kv[0]))
    return [(i, cos(v, query)) for i, v in scored[:k]]


def test_knn_matches_brute_force():
    rng = np.random.default_rng(5)
    vectors = {f"v{i:03d}": rng.standard_normal(16) for i in range(200)}
    index = EmbeddingIndex(vectors)
    for _ in range(20):
        q = rng.standard_normal(16)
        got = index.knn(q, 10)
        expected = brute_knn(vectors, q, 10)
        assert [i for i, _ in got] == [i for i, _ in expected]
        for (_, s1), (_, s2) in zip(got, expected):
            assert s1 == pytest.approx(s2, abs=1e-12)


def test_knn_k_larger_than_index():
    vectors = {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])}
    index = EmbeddingIndex(vectors)
    got = index.knn(np.array([1.0, 0.1]), 10)
    assert len(got) == 2
    assert got[0][0] == "a"


def test_knn_duplicate_vectors_lower_id_first():
    v = np.array([1.0, 1.0])
    index = EmbeddingIndex({"b": v.copy(), "a": v.copy(), "c": v.copy()})
    got = index.knn(v, 3)
    assert [i for i, _ in got] == ["a", "b", "c"]


def test_knn_empty_index():
    with pytest.raises(EmptyIndex):
        EmbeddingIndex({}).knn(np.array([1.0]), 1)


def test_diversity_hand_trace():
    # Mean is 5; 0 and 10 tie at distance 5; lowest id wins; then farthest.
    index = EmbeddingIndex(
        {"p0": np.array([0.0]), "p1": np.array([5.0]), "p2": np.array([10.0])}
    )
    assert diversity_sample(index, 2) == ["p0", "p2"]


def test_diversity_k_equals_size():
    rng = np.random.default_rng(1)
    vectors = {f"x{i}": rng.standard_normal(4) for i in range(8)}
    index = EmbeddingIndex(vectors)
    assert sorted(diversity_sample(index, 8)) == sorted(vectors)


def test_diversity_k1_symmetric_tie():
    index = EmbeddingIndex({"a": np.array([-1.0]), "b": np.array([1.0])})
    assert diversity_sample(index, 1) == ["a"]


def test_diversity_k_too_large():
    index = EmbeddingIndex({"a": np.array([1.0])})
    with pytest.raises(KTooLarge):
        diversity_sample(index, 2)


def test_diversity_beats_random_subsets():
    rng = np.random.default_rng(99)
    vectors = {f"v{i:03d}": rng.standard_normal(8) for i in range(60)}
    index = EmbeddingIndex(vectors)
    k = 6
    picked = diversity_sample(index, k)
    pos = {i: p for p, i in enumerate(index.ids)}

    def min_pairwise(ids):
        pts = [index.matrix[pos[i]] for i in ids]
        return min(
            float(np.linalg.norm(pts[i] - pts[j]))
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        )

    ours = min_pairwise(picked)
    all_ids = list(vectors)
    for _ in range(100):
        sample = list(rng.choice(all_ids, size=k, replace=False))
        assert ours >= min_pairwise(sample)


def test_synthetic_provider_bit_identical_reads():
    from geoagency.bench import WorldSpec, generate_world
    from geoagency.embeddings import SyntheticProvider

    spec = WorldSpec(width=8, height=8, n_classes=2, voronoi_sites=4)
    w1, _ = generate_world(spec, seed=5)
    w2, _ = generate_world(spec, seed=5)
    p1 = SyntheticProvider(w1.rasters["embeddings"])
    p2 = SyntheticProvider(w2.rasters["embeddings"])
    for i in (0, 17, 63):
        assert p1.embed(i).tobytes() == p2.embed(i).tobytes()
        assert p1.embed(i).tobytes() == p1.embed(i).tobytes()


def test_embeddings_file_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    vectors = {f"cell_{i:06d}": rng.standard_normal(32) for i in range(50)}
    index = EmbeddingIndex(vectors)
    path = tmp_path / "embeddings.bin"
    save_embeddings(index, path)
    back = load_embeddings(path)
    assert back.ids == index.ids
    assert back.matrix.tobytes() == index.matrix.tobytes()
