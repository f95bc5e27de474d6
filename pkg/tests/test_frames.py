import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symapprox import frames, sampling
from symapprox.errors import DegenerateFrameError, DimensionError, DomainError

MERCEDES = np.sqrt(2 / 3) * np.array(
    [[np.cos(t), np.sin(t)] for t in np.deg2rad([90, 210, 330])]
).T


def _projection(n, rank, rng):
    B = sampling.random_isometry(n, rank, rng)
    return B @ B.conj().T


def test_frame_bounds_examples():
    assert frames.frame_bounds(np.eye(2)) == pytest.approx((1, 1))
    assert frames.frame_bounds(MERCEDES) == pytest.approx((1, 1))
    assert frames.frame_bounds(np.diag([2.0, 3.0])) == pytest.approx((4, 9))


def test_zero_frame_is_rejected():
    with pytest.raises(DegenerateFrameError):
        frames.Frame(np.zeros((2, 2)))


def test_zero_columns_are_allowed():
    f = frames.Frame([[1.0, 0.0], [0.0, 0.0]])
    assert frames.frame_bounds(f) == pytest.approx((1, 1))


def test_parseval_examples():
    assert frames.is_parseval(np.eye(2))
    assert not frames.is_parseval(np.diag([2.0, 3.0]))
    assert frames.is_parseval(MERCEDES)
    with pytest.raises(DomainError):
        frames.ParsevalFrame(np.diag([2.0, 3.0]))


def test_canonical_examples():
    np.testing.assert_allclose(frames.canonical_parseval(np.diag([2.0, 3.0])).synthesis, np.eye(2))
    np.testing.assert_allclose(
        frames.canonical_parseval([[1.0, 1.0]]).synthesis, [[2**-0.5, 2**-0.5]], atol=1e-14
    )
    np.testing.assert_allclose(frames.canonical_parseval(MERCEDES).synthesis, MERCEDES, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_canonical_is_parseval_and_weakly_similar(d, n, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, min(d, n) + 1))
    F = sampling.random_frame(d, n, rng, rank=rank)
    U = frames.canonical_parseval(F)
    assert frames.is_parseval(U)
    assert frames.weakly_similar(F, U)
    assert frames.component_of(U, F) == 0
    lo, hi = frames.frame_bounds(U)
    assert lo == pytest.approx(1, abs=1e-8) and hi == pytest.approx(1, abs=1e-8)


def test_index_pair_examples():
    assert frames.index_pair(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == 0
    assert frames.index_pair(np.eye(2), np.diag([1.0, 0.0])) == 1
    rng = np.random.default_rng(7)
    assert frames.index_pair(_projection(8, 3, rng), _projection(8, 5, rng)) == -2


def test_index_pair_rejects_non_projections():
    with pytest.raises(DomainError):
        frames.index_pair(np.diag([1.0, 0.5]), np.eye(2))
    with pytest.raises(DimensionError):
        frames.index_pair(np.eye(2), np.eye(3))


def test_additivity_examples():
    p = np.eye(2)
    assert frames.index_additivity_check(p, p, p)
    assert frames.index_additivity_check(np.eye(2), np.diag([1.0, 0.0]), np.zeros((2, 2)))
    rng = np.random.default_rng(11)
    P, Q, R = (_projection(8, r, rng) for r in (5, 2, 4))
    assert frames.index_pair(P, R) == 1
    assert frames.index_additivity_check(P, Q, R)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_index_is_antisymmetric_and_additive(n, seed):
    rng = np.random.default_rng(seed)
    P, Q, R = (_projection(n, int(rng.integers(0, n + 1)), rng) for _ in range(3))
    assert frames.index_pair(P, Q) == -frames.index_pair(Q, P)
    assert frames.index_additivity_check(P, Q, R)


def test_weak_similarity_examples():
    F = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    assert frames.weakly_similar(F, frames.canonical_parseval(F))
    assert not frames.weakly_similar(np.eye(2), [[1.0, 0.0], [0.0, 0.0]])
    V = sampling.random_unitary(2, np.random.default_rng(0))
    assert frames.weakly_similar(F, V @ F)
    with pytest.raises(DimensionError):
        frames.weakly_similar(np.eye(2), np.eye(3))


def test_quadratic_distance_examples():
    assert frames.quadratic_distance(np.eye(2), np.eye(2)) == 0
    assert frames.quadratic_distance(np.diag([0.4, 0.6]), np.eye(2)) == pytest.approx(0.52)
    assert frames.quadratic_distance([[1.0, 1.0]], [[2**-0.5, 2**-0.5]]) == pytest.approx(
        2 * (1 - 2**-0.5) ** 2
    )


def test_component_of_examples():
    F = np.diag([0.4, 0.6])
    assert frames.component_of(np.eye(2), F) == 0
    assert frames.component_of(np.diag([1.0, 0.0]), F) == 1
    rng = np.random.default_rng(5)
    F3 = sampling.random_frame(6, 7, rng, rank=3)
    X5 = sampling.random_partial_isometry(6, 7, 5, rng)
    assert frames.component_of(X5, F3) == -2
    with pytest.raises(DimensionError):
        frames.component_of(np.eye(3), F)
