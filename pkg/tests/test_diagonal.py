import itertools
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symapprox import _jit, _kernels, diagonal
from symapprox.diagonal import INF, DiagonalModel, SignSequence
from symapprox.errors import DomainError, InfeasibleComponentError, ResourceLimitError

LEVELS = (0.0, 0.3, 0.5, 0.7, 1.0, 1.4)
sequences = st.lists(st.sampled_from(LEVELS), min_size=0, max_size=7)


def _values(fam):
    return {b.values for b in fam.representatives}


def test_seq_index_examples():
    assert diagonal.seq_index([0.4, 0.6], SignSequence((1, 1))) == 0
    assert diagonal.seq_index([0.4, 0.6], SignSequence((0, 1))) == 1
    assert diagonal.seq_index([0.0], SignSequence((-1,))) == -1


def test_seq_index_counts_implicit_positions():
    m = DiagonalModel((0.5,), tail_ones=INF, kernel_dim=INF)
    b = SignSequence((1,), kernel_values=(0, 1), tail_values=(1, 0, 0))
    assert diagonal.seq_index(m, b) == 2 - 1


def test_sign_sequence_validation():
    with pytest.raises(DomainError):
        SignSequence((2,))
    with pytest.raises(DomainError):
        diagonal.seq_index([0.4, 0.6], SignSequence((1,)))
    with pytest.raises(DomainError):
        diagonal.seq_index(DiagonalModel((0.4,)), SignSequence((1,), tail_values=(0,)))


def test_divergent_tail_is_refused():
    m = DiagonalModel((0.5,), tail_ones=INF, tail_converges=False)
    with pytest.raises(DomainError):
        diagonal.minimize_k(m, 0)


def test_minimize_examples():
    fam = diagonal.minimize_k([0.4, 0.6], 0)
    assert fam.kind == "unique" and _values(fam) == {(1, 1)}
    assert fam.value == pytest.approx(0.52, abs=1e-15)
    fam = diagonal.minimize_k([0.4, 0.6], 1)
    assert fam.kind == "unique" and _values(fam) == {(0, 1)}
    assert fam.value == pytest.approx(0.32, abs=1e-15)
    fam = diagonal.minimize_k([0.7, 0.0], -1)
    assert fam.count == 2 and _values(fam) == {(1, 1), (1, -1)}
    assert fam.value == pytest.approx(0.09 + 1)
    fam = diagonal.minimize_k([0.5, 0.5, 0.8], 1)
    assert fam.kind == "finite" and _values(fam) == {(0, 1, 1), (1, 0, 1)}
    assert fam.value == pytest.approx(0.25 + 0.25 + 0.04)


def test_minimize_rejects_out_of_bounds():
    with pytest.raises(InfeasibleComponentError) as exc:
        diagonal.minimize_k([0.4, 0.6], 3)
    assert exc.value.bound == "upper"
    with pytest.raises(InfeasibleComponentError) as exc:
        diagonal.minimize_k([0.4, 0.6], -1)
    assert exc.value.bound == "lower"


def test_oracle_examples():
    fam = diagonal.brute_force_oracle([0.4, 0.6], 1)
    assert _values(fam) == {(0, 1)} and fam.value == pytest.approx(0.32)
    assert _values(diagonal.brute_force_oracle([1.0], 0)) == {(1,)}
    assert diagonal.brute_force_oracle([1.0], 0).value == 0
    assert diagonal.brute_force_oracle([0.5], 0).value == diagonal.brute_force_oracle([0.5], 1).value == 0.25
    assert diagonal.brute_force_oracle([0.5], -1).kind == "none"


def test_oracle_size_cap():
    with pytest.raises(ResourceLimitError):
        diagonal.brute_force_oracle(np.ones(13), 0)


def test_index_bounds():
    assert diagonal.model_index_bounds([0.4, 0.6]) == (0, 2)
    assert diagonal.model_index_bounds(DiagonalModel((), kernel_dim=INF))[0] == -INF
    assert diagonal.model_index_bounds(DiagonalModel((), tail_ones=INF))[1] == INF


@settings(max_examples=200, deadline=None)
@given(sequences)
def test_closed_form_matches_oracle(a):
    oracle = diagonal.brute_force_all(a)
    lo, hi = diagonal.model_index_bounds(a)
    assert set(oracle) == set(range(lo, hi + 1))
    for k in range(lo, hi + 1):
        fam = diagonal.minimize_k(a, k)
        assert fam.value == oracle[k].value
        assert _values(fam) == _values(oracle[k])
        assert fam.count == oracle[k].count


@settings(max_examples=100, deadline=None)
@given(sequences)
def test_representatives_attain_value_and_index(a):
    lo, hi = diagonal.model_index_bounds(a)
    for k in range(lo, hi + 1):
        fam = diagonal.minimize_k(a, k)
        for b in fam.representatives:
            assert diagonal.seq_index(a, b) == k
            assert diagonal.objective(a, b) == fam.value


@pytest.mark.parametrize("zeros,m", [(1, 1), (3, 1), (3, 2), (4, 3), (5, 5)])
def test_negative_count_formula(zeros, m):
    a = [0.7] + [0.0] * zeros
    fam = diagonal.minimize_k(a, -m)
    assert fam.count == 2**m * math.comb(zeros, m)
    assert len(fam.representatives) == fam.count


@settings(max_examples=100, deadline=None)
@given(sequences)
def test_zero_component_value(a):
    expected = sum(sorted((x - 1) ** 2 for x in a if x > 0))
    assert diagonal.minimize_k(a, 0).value == pytest.approx(expected, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(LEVELS[1:]), min_size=1, max_size=7))
def test_value_increases_beyond_r(a):
    # each step past r zeroes the next smallest s > 1/2 and adds exactly 2s - 1
    s = sorted(a)
    r = sum(1 for x in s if x <= 0.5)
    prev = diagonal.minimize_k(a, r).value
    for k in range(r + 1, len(s) + 1):
        cur = diagonal.minimize_k(a, k).value
        step = 2 * s[k - 1] - 1
        assert cur - prev == pytest.approx(step, abs=1e-12)
        assert 0 < cur - prev <= s[k - 1] ** 2 + 1e-12
        prev = cur


def test_infinite_kernel_family():
    m = DiagonalModel((0.7,), kernel_dim=INF, cokernel_dim=INF)
    fam = diagonal.minimize_k(m, -2, limit=5)
    assert fam.kind == "infinite" and fam.count == INF
    assert len(fam.representatives) == 5
    for b in fam.representatives:
        assert diagonal.seq_index(m, b) == -2
        assert diagonal.objective(m, b) == fam.value


def test_infinite_tail_ties_at_one():
    m = DiagonalModel((0.3,), tail_ones=INF)
    fam = diagonal.minimize_k(m, 2, limit=3)
    assert fam.kind == "infinite"
    assert fam.value == pytest.approx(0.09 + 1.0)
    assert len(fam.representatives) == 2
    assert len(_values(fam)) == 1  # tail choices live in tail_values
    assert len({b.tail_values for b in fam.representatives}) == 2


def test_finite_model_matches_materialized_oracle():
    m = DiagonalModel((0.5, 0.0, 1.4), tail_ones=2, kernel_dim=3)
    a = m.materialize()
    assert a.tolist() == [0.5, 0.0, 1.4, 0.0, 0.0, 1.0, 1.0]
    oracle = diagonal.brute_force_all(a)
    for k in range(-3, 5):
        fam = diagonal.minimize_k(m, k)
        assert fam.value == oracle[k].value
        assert {tuple(b.as_array(m)) for b in fam.representatives} == _values(oracle[k])


@pytest.mark.skipif(not _jit.HAVE_NUMBA, reason="numba not installed")
@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 3, allow_nan=False), min_size=0, max_size=6))
def test_backends_agree_bitwise(a):
    a = np.array(a)
    v1, i1 = _kernels.enumerate_signs(a, "numba")
    v2, i2 = _kernels.enumerate_signs(a, "numpy")
    assert np.array_equal(i1, i2)
    assert np.array_equal(v1, v2)


def test_decode_is_lexicographic():
    rows = _kernels.decode(np.arange(9), 2)
    assert [tuple(r) for r in rows] == list(itertools.product((-1, 0, 1), repeat=2))


def test_set_backend_validates():
    old = _jit.backend()
    with pytest.raises(ValueError):
        _jit.set_backend("cuda")
    _jit.set_backend("numpy")
    assert _jit.backend() == "numpy"
    _jit.set_backend(old)


def test_env_flag_selects_numpy_fallback():
    code = "from symapprox import _jit; print(_jit.backend())"
    env = dict(os.environ, SYMAPPROX_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
