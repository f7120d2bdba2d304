import numpy as np
import pytest

from tracex.embeddings import EmbeddingMatrix
from tracex.semantics import (
    DistanceRecord,
    cosine_distance,
    distance_record,
    euclidean_distance,
    relaxed_wmd,
    similarity,
    soft_cosine,
    wmd,
)
from tracex.tokenization import TokenCounts
from tracex.transport import transport_cost


def matrix(**vectors):
    vocab = sorted(vectors)
    return EmbeddingMatrix(vocab=vocab, vectors=np.array([vectors[t] for t in vocab], float))


def test_cosine_distance_basics():
    u = np.array([1.0, 0.0])
    v = np.array([0.0, 1.0])
    assert cosine_distance(u, u) == 0.0
    assert cosine_distance(u, v) == pytest.approx(1.0)
    assert cosine_distance(u, -u) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        cosine_distance(u, np.zeros(2))


def test_euclidean_distance():
    assert euclidean_distance([0, 0], [3, 4]) == pytest.approx(5.0)
    assert euclidean_distance([1, 2], [1, 2]) == 0.0
    with pytest.raises(ValueError):
        euclidean_distance([1], [1, 2])


def test_soft_cosine_identical_counts():
    m = matrix(x=[1, 0], y=[0, 1])
    a = TokenCounts({"x": 2, "y": 1})
    assert soft_cosine(a, a, m) == pytest.approx(1.0)


def test_soft_cosine_orthogonal_reduces_to_cosine():
    m = matrix(x=[1, 0], y=[0, 1])
    a = TokenCounts({"x": 1})
    b = TokenCounts({"x": 1, "y": 1})
    plain = (1 * 1) / (1 * np.sqrt(2))
    assert soft_cosine(a, b, m) == pytest.approx(plain)


def test_soft_cosine_hand_case():
    # cos(v_x, v_y) = 0.5 -> s_xy = 0.25
    m = matrix(x=[1.0, 0.0], y=[0.5, np.sqrt(3) / 2])
    a = TokenCounts({"x": 1})
    b = TokenCounts({"y": 1})
    assert soft_cosine(a, b, m) == pytest.approx(0.25, abs=1e-12)


def test_soft_cosine_oov_side_error():
    m = matrix(x=[1, 0])
    with pytest.raises(ValueError):
        soft_cosine(TokenCounts({"x": 1}), TokenCounts({"oov": 1}), m)


def test_wmd_identical_bags():
    m = matrix(x=[1, 0], y=[0, 1])
    a = TokenCounts({"x": 2, "y": 3})
    value, relaxed = wmd(a, a, m)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert not relaxed


def test_wmd_singleton_bags():
    m = matrix(x=[0.0, 0.0], y=[3.0, 4.0])
    value, _ = wmd(TokenCounts({"x": 1}), TokenCounts({"y": 5}), m)
    assert value == pytest.approx(5.0)


def test_transport_hand_cases():
    assert transport_cost([1, 1], [1, 1], [[0, 1], [1, 0]]) == pytest.approx(0.0)
    assert transport_cost([1, 1], [1, 1], [[1, 0], [0, 1]]) == pytest.approx(0.0)
    assert transport_cost([1, 1], [1, 1], [[1, 1], [1, 3]]) == pytest.approx(1.0)


def test_wmd_symmetric_and_triangle():
    rng = np.random.default_rng(12)
    vocab = [f"t{i}" for i in range(6)]
    m = EmbeddingMatrix(vocab=vocab, vectors=rng.normal(size=(6, 3)))
    bags = []
    for _ in range(3):
        support = rng.choice(vocab, size=3, replace=False)
        bags.append(TokenCounts({t: int(rng.integers(1, 5)) for t in support}))
    d01, _ = wmd(bags[0], bags[1], m)
    d10, _ = wmd(bags[1], bags[0], m)
    d02, _ = wmd(bags[0], bags[2], m)
    d12, _ = wmd(bags[1], bags[2], m)
    assert d01 == pytest.approx(d10, abs=1e-9)
    assert d02 <= d01 + d12 + 1e-9


def test_relaxed_is_lower_bound():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.integers(1, 8, size=4)
        b = rng.integers(1, 8, size=3)
        cost = rng.random((4, 3)) * 2
        exact = transport_cost(a, b, cost)
        lb = relaxed_wmd(a.astype(float), b.astype(float), cost)
        assert exact >= lb - 1e-9


def test_similarity_transform():
    assert similarity(0.0) == 1.0
    assert similarity(1.0) == 0.5
    assert similarity(2.0) == pytest.approx(1 / 3)


def test_distance_record_full():
    m = matrix(x=[1.0, 0.0], y=[0.0, 1.0])
    a = TokenCounts({"x": 1})
    b = TokenCounts({"y": 1})
    rec = distance_record(a, b, m, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert rec.wmd == pytest.approx(np.sqrt(2))
    assert rec.wmd_sim == pytest.approx(1 / (1 + np.sqrt(2)))
    assert rec.cos == pytest.approx(1.0)
    assert rec.cos_sim == pytest.approx(0.5)
    assert rec.euc == pytest.approx(np.sqrt(2))


def test_distance_record_undefined_oov():
    m = matrix(x=[1.0, 0.0])
    rec = distance_record(TokenCounts({"x": 1}), TokenCounts({"zz": 1}), m, None, None)
    assert isinstance(rec, DistanceRecord)
    assert rec.wmd is None
    assert rec.scm is None
    assert rec.wmd_sim is None
