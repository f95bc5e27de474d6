import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symapprox import approximator as ap
from symapprox import diagonal, frames, sampling
from symapprox.diagonal import INF, DiagonalModel
from symapprox.errors import ComponentMismatchError, DomainError, InfeasibleComponentError
from symapprox.linalg import hs_distance, is_partial_isometry


def test_component_report_examples():
    rep = ap.component_report(np.diag([0.4, 0.6]))
    assert (rep.n1, rep.n2, rep.n3) == (0, 2, 0)
    assert rep.indices() == [0, 1, 2]
    rep = ap.component_report([[1.0, 1.0]])
    assert (rep.n1, rep.n2, rep.n3) == (1, 1, 0)
    assert rep.indices() == [0, 1]


def test_component_report_infinite_models():
    rep = ap.component_report(DiagonalModel((0.5,), tail_ones=INF, kernel_dim=INF, cokernel_dim=3))
    assert rep.lower == -3 and rep.upper == INF
    assert 1000 in rep and -4 not in rep
    rep = ap.component_report(DiagonalModel((), tail_ones=INF, kernel_dim=INF, cokernel_dim=INF))
    assert rep.lower == -INF
    assert rep.indices(window=2) == [-2, -1, 0, 1, 2]
    with pytest.raises(DomainError):
        rep.indices()


def test_divergent_model_has_no_components():
    rep = ap.component_report(DiagonalModel((0.5,), tail_ones=INF, tail_converges=False))
    assert not rep.nonempty and rep.indices() == []


def test_approx_k0_is_canonical():
    res = ap.approx_in_component(np.diag([0.4, 0.6]), 0)
    np.testing.assert_allclose(res.minimizer.synthesis, np.eye(2), atol=1e-14)
    assert res.squared_distance == pytest.approx(0.52, abs=1e-12)
    assert res.uniqueness == "unique"


def test_approx_positive_unique():
    res = ap.approx_in_component(np.diag([0.4, 0.6]), 1)
    np.testing.assert_allclose(res.minimizer.synthesis, np.diag([0.0, 1.0]), atol=1e-14)
    assert res.squared_distance == pytest.approx(0.32, abs=1e-12)
    assert res.uniqueness == "unique"


def test_approx_positive_tie_gives_continuum():
    F = np.diag([0.5, 0.5, 0.8])
    res = ap.approx_in_component(F, 1)
    assert res.squared_distance == pytest.approx(0.54, abs=1e-12)
    assert res.uniqueness == "infinitelyMany"
    assert res.family["E1_rank"] == 1
    assert res.family["eigenspace_basis"].shape == (3, 2)
    assert res.family["diagonal_count"] == 2
    members = ap.enumerate_family(res, F, 4, seed=3)
    assert len(members) == 4
    for k, Y in members:
        assert k == 1
        assert frames.component_of(Y, F) == 1
        assert hs_distance(F, Y) ** 2 == pytest.approx(0.54, abs=1e-12)


def test_approx_negative_component():
    F = np.array([[1.0, 1.0], [0.0, 0.0]])
    res = ap.approx_in_component(F, -1)
    expected = 2 * (1 - 2**-0.5) ** 2 + 1
    assert res.squared_distance == pytest.approx(expected, abs=1e-12)
    assert hs_distance(F, res.minimizer.synthesis) ** 2 == pytest.approx(expected, abs=1e-12)
    assert res.uniqueness == "infinitelyMany"
    assert res.family["diagonal_count"] == 2
    assert res.family["rank"] == 1
    for k, Y in ap.enumerate_family(res, F, 3, seed=0):
        assert frames.component_of(Y, F) == -1
        assert hs_distance(F, Y) ** 2 == pytest.approx(expected, abs=1e-12)


def test_approx_rejects_infeasible():
    with pytest.raises(InfeasibleComponentError):
        ap.approx_in_component([[1.0, 1.0]], -1)
    with pytest.raises(InfeasibleComponentError):
        ap.approx_in_component(np.diag([0.4, 0.6]), 3)
    with pytest.raises(DomainError):
        ap.approx_in_component(np.diag([0.4, 0.6]), 0.5)


def test_distance_examples():
    assert ap.distance_to_component(np.diag([0.4, 0.6]), 0) == pytest.approx(0.52, abs=1e-15)
    assert ap.distance_to_component(np.diag([0.4, 0.6]), 1) == pytest.approx(0.32, abs=1e-15)
    F = np.zeros((3, 3))
    F[0, 0], F[1, 1] = 0.4, 0.6
    assert ap.distance_to_component(F, -1) == pytest.approx(1.52, abs=1e-15)


@pytest.mark.parametrize(
    "diag,k,d2,uniq",
    [
        ([0.4, 0.6], 1, 0.32, "unique"),
        ([0.7, 0.8], 0, 0.13, "unique"),
    ],
)
def test_global_examples(diag, k, d2, uniq):
    res = ap.global_approx(np.diag(diag))
    assert res.k == k and res.r == k
    assert res.squared_distance == pytest.approx(d2, abs=1e-12)
    assert res.uniqueness == uniq
    assert not res.boundary and res.notes == ()


def test_global_half_boundary():
    res = ap.global_approx(np.diag([0.5]))
    assert res.r == 1 and res.boundary
    assert res.tied_components == (0, 1)
    assert [t.squared_distance for t in res.tied] == [0.25, 0.25]
    assert res.uniqueness == "finitelyMany" and res.count == 2
    assert ap.CRITERION_NOTE in res.notes


def test_global_double_half():
    res = ap.global_approx(np.diag([0.5, 0.5]))
    assert res.tied_components == (0, 1, 2)
    assert res.squared_distance == pytest.approx(0.5, abs=1e-12)
    assert res.uniqueness == "infinitelyMany"
    assert ap.CRITERION_NOTE not in res.notes


def test_global_near_half_is_snapped():
    res = ap.global_approx(np.diag([0.5 + 1e-11, 0.9]))
    assert res.boundary and res.r == 1
    assert res.tied_components == (0, 1)


def test_global_diagonal_model():
    g = ap.global_diagonal([0.5])
    assert g.tied == (0, 1) and g.count == 2 and g.value == 0.25
    g = ap.global_diagonal(DiagonalModel((0.3, 0.9), tail_ones=INF, kernel_dim=INF))
    assert g.tied == (1,) and g.uniqueness == "unique"
    assert g.value == pytest.approx(0.09 + 0.01)


def test_verify_critical_point_examples():
    F = np.array([[2.0, 1.0], [0.0, 1.0]])
    assert ap.verify_critical_point(F, frames.canonical_parseval(F)) <= 1e-12
    res = ap.approx_in_component(np.diag([0.4, 0.6]), 1)
    assert ap.verify_critical_point(np.diag([0.4, 0.6]), res.minimizer) <= 1e-10
    rng = np.random.default_rng(0)
    G = sampling.random_frame(3, 3, rng)
    X = sampling.random_partial_isometry(3, 3, 3, rng)
    assert ap.verify_critical_point(G, X) > 1e-3


def test_connect_identity():
    X = np.eye(2)
    cert = ap.connect(X, X, X)
    np.testing.assert_allclose(cert.v, np.eye(2))
    np.testing.assert_allclose(cert.w, np.eye(2))
    assert cert.residual == 0


def test_connect_rotation():
    R = np.array([[1.0, -1.0], [1.0, 1.0]]) / 2**0.5
    cert = ap.connect(np.eye(2), R, np.eye(2))
    assert cert.residual <= 1e-12
    np.testing.assert_allclose(cert.w, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(cert.v @ R, np.eye(2), atol=1e-12)
    assert hs_distance(cert.samples[0][1], np.eye(2)) <= 1e-12
    assert cert.endpoint_residual <= 1e-12


def test_connect_swapped_axes():
    X, Y = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    cert = ap.connect(X, Y, np.eye(2))
    np.testing.assert_allclose(cert.v @ Y @ cert.w.conj().T, X, atol=1e-12)
    for _, P in cert.samples:
        assert is_partial_isometry(P, 1e-10)


def test_connect_rejects_cross_component():
    with pytest.raises(ComponentMismatchError) as exc:
        ap.connect(np.eye(2), np.diag([1.0, 0.0]), np.eye(2))
    assert (exc.value.kx, exc.value.ky) == (0, 1)


def test_gap_examples():
    assert hs_distance(np.diag([1.0, 0.0]), np.eye(2)) == 1.0
    F = sampling.random_frame(3, 4, np.random.default_rng(2))
    assert ap.gap_check(F, trials=200, seed=1) >= 1 - 1e-9
    assert ap.gap_check(F, trials=20, seed=5) == ap.gap_check(F, trials=20, seed=5)


def test_gap_two_steps_apart():
    rng = np.random.default_rng(4)
    for _ in range(50):
        X = sampling.random_partial_isometry(4, 4, 3, rng)
        Z = sampling.random_partial_isometry(4, 4, 1, rng)
        assert hs_distance(X, Z) >= math.sqrt(2) - 1e-9


def test_left_unitary_invariance():
    rng = np.random.default_rng(9)
    F = sampling.random_frame(4, 5, rng, rank=3)
    V = sampling.random_unitary(4, rng)
    for k in ap.component_report(F).indices():
        a = ap.approx_in_component(F, k)
        b = ap.approx_in_component(V @ F, k)
        assert a.squared_distance == pytest.approx(b.squared_distance, abs=1e-9)
        if a.uniqueness == "unique":
            assert hs_distance(V @ a.minimizer.synthesis, b.minimizer.synthesis) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_results_satisfy_invariants(d, n, seed):
    rng = np.random.default_rng(seed)
    F = sampling.random_frame(d, n, rng, rank=int(rng.integers(1, min(d, n) + 1)))
    ds = []
    for k in ap.component_report(F).indices():
        res = ap.approx_in_component(F, k)
        assert frames.component_of(res.minimizer, F) == k
        assert abs(hs_distance(F, res.minimizer.synthesis) ** 2 - res.squared_distance) <= 1e-9
        ds.append(res.squared_distance)
    g = ap.global_approx(F)
    assert abs(g.squared_distance - min(ds)) <= 1e-12
    if not g.boundary:
        assert g.k == g.r


def test_local_uniqueness_at_k0():
    rng = np.random.default_rng(12)
    F = np.diag([0.3, 1.6, 2.0])
    res = ap.approx_in_component(F, 0)
    best = res.squared_distance
    U = res.minimizer.synthesis
    for eps in (1e-4, 1e-5):
        for _ in range(20):
            X = sampling.small_unitary(3, eps, rng) @ U @ sampling.small_unitary(3, eps, rng)
            if hs_distance(F, X) ** 2 <= best + 1e-6:
                assert hs_distance(X, U) <= 1e-3


def test_oracle_matches_diagonal_frames():
    rng = np.random.default_rng(1)
    for _ in range(30):
        a = rng.choice([0.0, 0.3, 0.5, 0.7, 1.0, 1.4], size=4)
        if not a.any():
            continue
        F = np.diag(a)
        oracle = diagonal.brute_force_all(a)
        rep = ap.component_report(F)
        for k in rep.indices():
            assert abs(ap.distance_to_component(F, k) - oracle[k].value) <= 1e-12
