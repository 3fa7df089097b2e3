import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from walshlab.functions import DyadicFunction, SpectralVector, values_equal
from walshlab.spectral import (
    dirichlet_direct,
    dirichlet_dyadic,
    dirichlet_fast,
    fwht_forward,
    fwht_inverse,
    index_stats,
    partial_sum,
    rademacher,
    walsh,
)
from walshlab.constructions import make_atom, AtomRecipe
from walshlab.analysis import PExponent

from oracles import dirichlet_by_definition, naive_forward, variation_by_runs, walsh_value


# -- Walsh system ------------------------------------------------------------


def test_rademacher_examples():
    assert rademacher(0, 1).values.tolist() == [1, -1]
    assert rademacher(1, 2).values.tolist() == [1, -1, 1, -1]
    with pytest.raises(ValueError):
        rademacher(2, 2)


def test_rademacher_integral_zero():
    for m in (1, 3, 5):
        for k in range(m):
            assert rademacher(k, m).integral() == 0


def test_walsh_examples():
    assert walsh(0, 3).values.tolist() == [1] * 8
    assert walsh(3, 2).values.tolist() == [1, -1, -1, 1]
    with pytest.raises(ValueError):
        walsh(8, 3)


def test_walsh_matches_product_oracle():
    m = 4
    for n in range(1 << m):
        expected = [walsh_value(n, x, m) for x in range(1 << m)]
        assert walsh(n, m).values.tolist() == expected


def test_walsh_orthonormality_exact():
    m = 3
    for a in range(8):
        for b in range(8):
            prod = (walsh(a, m) * walsh(b, m)).integral()
            assert prod == (1 if a == b else 0)


# -- transform ---------------------------------------------------------------


def test_forward_of_walsh_is_unit_vector():
    spec = fwht_forward(walsh(5, 3))
    expected = [0] * 8
    expected[5] = 1
    assert spec.coeffs.tolist() == expected


def test_forward_of_constant():
    spec = fwht_forward(DyadicFunction.constant(3, 1, "exact"))
    assert spec.coeffs.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]


def test_forward_matches_naive_oracle_exact():
    rng = np.random.default_rng(11)
    m = 4
    vals = [int(v) for v in rng.integers(-9, 10, 1 << m)]
    f = DyadicFunction.from_values(m, vals, "exact")
    assert fwht_forward(f).coeffs.tolist() == naive_forward(vals, m)


def test_forward_matches_naive_oracle_float():
    rng = np.random.default_rng(12)
    m = 5
    vals = rng.standard_normal(1 << m)
    f = DyadicFunction.from_values(m, vals)
    got = fwht_forward(f).coeffs
    want = naive_forward(list(vals), m)
    assert np.allclose(got, want, rtol=0, atol=1e-14)


def test_roundtrip_exact_bit_identical():
    f = dirichlet_direct(3, 4)
    assert values_equal(fwht_inverse(fwht_forward(f)), f)


def test_roundtrip_float_m16():
    rng = np.random.default_rng(13)
    f = DyadicFunction.from_values(16, rng.standard_normal(1 << 16))
    back = fwht_inverse(fwht_forward(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12


def test_inverse_of_zero_and_unit():
    zero = SpectralVector(3, np.zeros(8))
    assert fwht_inverse(zero).values.tolist() == [0.0] * 8
    unit = np.zeros(8)
    unit[6] = 1.0
    assert fwht_inverse(SpectralVector(3, unit)).values.tolist() == walsh(6, 3).as_float_array().tolist()


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_parseval(m, seed):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(1 << m)
    spec = fwht_forward(DyadicFunction.from_values(m, vals))
    lhs = np.sum(vals**2) / vals.size
    rhs = np.sum(spec.coeffs**2)
    assert math.isclose(lhs, rhs, rel_tol=1e-12)


# -- index characteristics -----------------------------------------------------


def test_index_stats_examples():
    s = index_stats(5)
    assert (s.low, s.high, s.rho, s.variation) == (0, 2, 2, 4)
    s = index_stats(6)
    assert (s.low, s.high, s.rho, s.variation) == (1, 2, 1, 2)
    for k in range(1, 20):
        s = index_stats(1 << k)
        assert s.rho == 0 and s.variation == 2
    with pytest.raises(ValueError):
        index_stats(0)


@given(st.integers(1, 10**9))
def test_index_stats_invariants(n):
    s = index_stats(n)
    assert (1 << s.high) <= n < (1 << (s.high + 1))
    assert n % (1 << s.low) == 0 and (n >> s.low) & 1
    assert s.rho == s.high - s.low >= 0
    assert s.variation == variation_by_runs(n) >= 2


# -- Dirichlet kernels ---------------------------------------------------------


def test_dirichlet_direct_examples():
    assert dirichlet_direct(1, 3).values.tolist() == [1] * 8
    assert dirichlet_direct(3, 2).values.tolist() == [3, 1, 1, -1]
    with pytest.raises(ValueError):
        dirichlet_direct(5, 2)
    with pytest.raises(ValueError):
        dirichlet_direct(0, 2)


def test_dirichlet_direct_matches_definition_oracle():
    m = 3
    for n in range(1, (1 << m) + 1):
        assert dirichlet_direct(n, m).values.tolist() == dirichlet_by_definition(n, m)


def test_dirichlet_dyadic_profile():
    assert dirichlet_dyadic(0, 3).values.tolist() == [1] * 8
    assert dirichlet_dyadic(2, 3).values.tolist() == [4, 4, 0, 0, 0, 0, 0, 0]
    with pytest.raises(ValueError):
        dirichlet_dyadic(4, 3)


def test_dirichlet_dyadic_equals_direct_at_powers():
    for m in (1, 3, 5):
        for k in range(m + 1):
            assert values_equal(dirichlet_dyadic(k, m), dirichlet_direct(1 << k, m))


def test_dirichlet_fast_equals_direct_exhaustive():
    for m in range(1, 9):
        for n in range(1, (1 << m) + 1):
            assert values_equal(dirichlet_fast(n, m), dirichlet_direct(n, m)), (m, n)


def test_dirichlet_l1_norms():
    d3 = dirichlet_direct(3, 2)
    assert abs(d3).integral() == Fraction(3, 2)
    for k in range(5):
        assert abs(dirichlet_dyadic(k, 4)).integral() == 1


def test_shift_identity_exhaustive_small():
    # A kernel continued past a power of two is the twisted low-order kernel.
    for m in (2, 4, 6):
        for k in range(m):
            wk = walsh(1 << k, m)
            base = dirichlet_direct(1 << k, m)
            for j in range(1, (1 << k) + 1):
                lhs = dirichlet_direct(j + (1 << k), m) - base
                rhs = wk * dirichlet_direct(j, m)
                assert values_equal(lhs, rhs), (m, k, j)


# -- partial sums ---------------------------------------------------------------


def test_partial_sum_full_spectrum_returns_input():
    rng = np.random.default_rng(17)
    f = DyadicFunction.from_values(4, rng.standard_normal(16))
    g = partial_sum(f, 16)
    assert values_equal(f, g) and g.tail_clamped


def test_partial_sum_one_term_is_mean():
    f = DyadicFunction.from_values(2, [3, 5, 1, -1], "exact")
    g = partial_sum(f, 1)
    assert g.values.tolist() == [2, 2, 2, 2]


def test_partial_sum_rejects_zero_order():
    with pytest.raises(ValueError):
        partial_sum(DyadicFunction.zeros(2), 0)


def test_partial_sum_of_atom_vanishes_below_support_order():
    p = PExponent.parse("1/2")
    atom = make_atom(AtomRecipe(2, 0, p, "random-signs", 9), 5, "exact")
    for n in range(1, 4):  # any order below 2^M = 4
        assert all(v == 0 for v in partial_sum(atom.values, n).values)
    coeffs = fwht_forward(atom.values).coeffs
    assert all(c == 0 for c in coeffs[:4])
    assert any(c != 0 for c in coeffs[4:])


def test_partial_sum_is_prefix_of_spectrum():
    f = dirichlet_direct(7, 3)
    # D_7 has unit coefficients below order 7; truncating at 5 gives D_5.
    assert values_equal(partial_sum(f, 5), dirichlet_direct(5, 3))


def test_partial_sum_linearity():
    rng = np.random.default_rng(23)
    a = DyadicFunction.from_values(4, rng.standard_normal(16))
    b = DyadicFunction.from_values(4, rng.standard_normal(16))
    lhs = partial_sum(a + b, 9)
    rhs = partial_sum(a, 9) + partial_sum(b, 9)
    assert np.allclose(lhs.values, rhs.values, atol=1e-13)


def test_partial_sum_l1_bound_by_variation():
    # ||S_n f||_1 <= c V(n) ||f||_1; the measured c never exceeds 1 because
    # the kernel's L1 norm is itself below the variation.
    rng = np.random.default_rng(19)
    m = 8
    for _ in range(20):
        f = DyadicFunction.from_values(m, rng.standard_normal(1 << m))
        norm_f = np.mean(np.abs(f.values))
        for n in (1, 3, 5, 21, 85, 170, 255, 256):
            norm_sn = np.mean(np.abs(partial_sum(f, n).values))
            assert norm_sn <= index_stats(n).variation * norm_f * (1 + 1e-12)


def test_partial_sum_convolution_oracle():
    # S_n f(x) equals the mean of f(t) D_n(x + t) over t, with + the group XOR.
    rng = np.random.default_rng(29)
    m, n = 4, 11
    vals = rng.standard_normal(1 << m)
    f = DyadicFunction.from_values(m, vals)
    dn = dirichlet_direct(n, m).as_float_array()
    expected = [
        np.mean([vals[t] * dn[x ^ t] for t in range(1 << m)]) for x in range(1 << m)
    ]
    assert np.allclose(partial_sum(f, n).values, expected, atol=1e-12)


# -- kernel lower-bound lemma ---------------------------------------------------


def test_kernel_lower_bound_on_pinned_interval():
    # Orders with distinct lowest/highest bits: on the interval pinned by the
    # lowest bit, |D_n| matches the top-bit-removed kernel and is >= 2^low / 4.
    m = 6
    for n in range(1, (1 << m) + 1):
        s = index_stats(n)
        if s.low == s.high:
            continue
        lo, hi = 1 << (m - s.low - 1), 1 << (m - s.low)
        dn = np.abs(dirichlet_direct(n, m).values[lo:hi])
        dref = np.abs(dirichlet_direct(n - (1 << s.high), m).values[lo:hi])
        assert np.array_equal(dn, dref)
        assert 4 * int(min(dn)) >= (1 << s.low)


def test_kernel_lower_bound_example_n3():
    d3 = dirichlet_direct(3, 2)
    assert [abs(v) for v in d3.values[2:4]] == [1, 1]  # = 2^0, comfortably >= 1/4
