import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from hurwitz_stable.errors import DomainError
from hurwitz_stable.lp1 import (
    LP1Function,
    coefficient_majorant,
    lp1_derivative,
    lp1_derivative_coeffs,
    lp1_eval,
    lp1_from_roots,
    lp1_taylor,
    tail_majorant,
)
from hurwitz_stable.stability import indicator_estimate

lp1_functions = st.builds(
    LP1Function,
    st.floats(0.1, 3.0),
    st.integers(0, 2),
    st.floats(0.0, 2.0),
    st.lists(st.floats(0.0, 2.0), max_size=4).map(tuple),
)


@pytest.mark.parametrize("F,z,expected", [
    (LP1Function(1.0, 0, 1.0, ()), 1.0, math.e),
    (LP1Function(1.0, 0, 0.0, (1.0,)), -1.0, 0.0),
    (LP1Function(1.0, 1, 1.0, ()), 2.0, 2.0 * math.e ** 2),
])
def test_eval_examples(F, z, expected):
    assert lp1_eval(F, z) == pytest.approx(expected, rel=1e-15, abs=1e-300)


def test_taylor_examples():
    k = np.arange(12)
    np.testing.assert_allclose(lp1_taylor(LP1Function.exp(), 11), [1 / math.factorial(i) for i in k], rtol=1e-15)
    np.testing.assert_array_equal(lp1_taylor(LP1Function(1.0, 0, 0.0, (1.0, 1.0, 1.0)), 5), [1, 3, 3, 1, 0, 0])
    f = lp1_taylor(LP1Function(1.0, 0, 1.0, (1.0,)), 8)
    oracle = [1.0] + [1 / math.factorial(i) + 1 / math.factorial(i - 1) for i in range(1, 9)]
    np.testing.assert_allclose(f, oracle, rtol=1e-15)
    assert f[:3].tolist() == [1.0, 2.0, 1.5]


def test_derivative_examples():
    np.testing.assert_allclose(lp1_derivative_coeffs(LP1Function.exp(), 10), lp1_taylor(LP1Function.exp(), 10),
                               rtol=1e-15)
    np.testing.assert_allclose(lp1_derivative_coeffs(LP1Function(1.0, 1, 1.0), 10),
                               lp1_taylor(LP1Function(1.0, 0, 1.0, (1.0,)), 10), rtol=1e-14)
    np.testing.assert_array_equal(lp1_derivative_coeffs(LP1Function(1.0, 0, 0.0, (1.0, 1.0)), 3), [2, 2, 0, 0])


@pytest.mark.parametrize("kwargs", [{"C": 0.0}, {"m": -1}, {"alpha": -0.5}, {"deltas": (-1.0,)}])
def test_invalid_parameters(kwargs):
    with pytest.raises(DomainError):
        LP1Function(**kwargs)


@given(lp1_functions)
def test_coefficients_positive_for_positive_C(F):
    assert np.all(lp1_taylor(F, 30) >= 0)


@given(lp1_functions, st.complex_numbers(max_magnitude=4.0))
@example(LP1Function(2.5, 1, 2.0, (1.0, 2.0)), -3 + 0j)
def test_derivative_paths_agree(F, z):
    c = lp1_derivative_coeffs(F, 80)
    series = np.polynomial.polynomial.polyval(z, c)
    # the series cancels for Re z < 0, so roundoff scales with sum |c_k z^k|
    scale = np.polynomial.polynomial.polyval(abs(z), np.abs(c))
    assert series == pytest.approx(lp1_derivative(F, z), rel=1e-11, abs=1e-11 + 1e-14 * scale)


@given(lp1_functions, st.integers(0, 40), st.floats(0.5, 6.0))
def test_truncation_within_tail_bound(F, N, R):
    z = R * np.exp(1j * np.linspace(0, 2 * np.pi, 16))
    partial = np.polynomial.polynomial.polyval(z, lp1_taylor(F, N))
    bound = tail_majorant(F, N, R, 0.0, 1.0)
    scale = coefficient_majorant(F, R, N + 60)
    assert np.max(np.abs(partial - lp1_eval(F, z))) <= bound + 1e-13 * scale


@given(st.floats(0.0, 2.0), st.lists(st.floats(0.0, 2.0), max_size=4).map(tuple), st.floats(0.0, 20.0))
def test_growth_lower_bound(alpha, deltas, r):
    F = LP1Function(1.0, 0, alpha, deltas)
    assert lp1_eval(F, r).real >= lp1_eval(F, 0.0).real * math.exp(alpha * r) * (1 - 1e-14)


@pytest.mark.parametrize("F", [LP1Function.exp(2.0), LP1Function(1.0, 0, 1.0, (1.0, 0.5)), LP1Function.exp(0.5)])
@pytest.mark.parametrize("theta", [0.0, math.pi / 2])
def test_indicator_is_alpha_cos(F, theta):
    radii = np.linspace(20, 60, 11)
    est = indicator_estimate(F, theta, radii)
    assert est.h == pytest.approx(F.alpha * math.cos(theta), abs=0.05)


def test_from_roots():
    F = lp1_from_roots([-1.0, -2.0, 0.0])
    assert F.m == 1
    assert lp1_eval(F, 3.0) == pytest.approx(3.0 * 4.0 * 5.0)


def test_round_trip():
    F = LP1Function(2.0, 1, 0.5, (0.25,))
    assert LP1Function.from_dict(F.to_dict()) == F
    assert set(F.to_dict()) == {"C", "m", "alpha", "deltas"}
