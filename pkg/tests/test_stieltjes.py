import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from hurwitz_stable.errors import (
    ConstantPsiError,
    DegenerateError,
    DomainError,
    InterlacingViolation,
    MixedTagError,
    PoleError,
)
from hurwitz_stable.measure import Measure
from hurwitz_stable.stieltjes import (
    S,
    S_INV,
    ClosedFormPsi,
    StieltjesRepr,
    class_of_combination,
    classify,
    closed_form_eval,
    closed_form_to_repr,
    coefficient_bounds,
    evaluate,
    membership_check,
    rational_to_repr,
    sandwich_holds,
    value_at_zero,
)

from conftest import INV_SQRT_DENSITY


def rational(c, poles, zeros):
    return ClosedFormPsi("rational_interlacing", c=c, poles=tuple(poles), zeros=tuple(zeros))


def upper_points(rng, n):
    r = 10 ** rng.uniform(-2, 2, n)
    th = rng.uniform(0.01, math.pi - 0.01, n)
    return r * np.exp(1j * th)


interlacing = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.floats(0.1, 3.0), min_size=2 * n, max_size=2 * n).map(
        lambda gaps: np.cumsum(gaps)
    ).flatmap(lambda pts: st.tuples(
        st.floats(0.2, 5.0),
        st.just(tuple(pts[::2])),
        st.sampled_from([tuple(pts[1::2]), tuple(pts[1::2][:-1])]),
    ))
)


# ---------------------------------------------------------------- eval ---

@pytest.mark.parametrize("psi,z,expected", [
    (StieltjesRepr(S, 0.0, 1.0), 2.0, 0.5),
    (StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY), 4.0, 0.5),
    (StieltjesRepr(S_INV, 1.0, 2.0), 3.0, 7.0),
])
def test_eval_examples(psi, z, expected):
    v = evaluate(psi, z)
    assert v.real == pytest.approx(expected, rel=1e-12)
    assert abs(v.imag) <= 1e-12


@pytest.mark.parametrize("z", [-1.0, -1e-15 + 0j, 0.0, -3 + 1e-16j])
def test_eval_rejects_branch_cut(z):
    with pytest.raises(DomainError):
        evaluate(StieltjesRepr(S, 0.0, 0.0, Measure.atom(1.0, 1.0)), z)


def test_eval_density_matches_principal_power(rng):
    psi = StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY)
    z = upper_points(rng, 20)
    np.testing.assert_allclose(evaluate(psi, z), z ** -0.5, rtol=1e-10)


def test_zero_representation_rejected():
    with pytest.raises(DegenerateError):
        StieltjesRepr(S)
    with pytest.raises(DomainError):
        StieltjesRepr(S, -1.0, 1.0)


# --------------------------------------------------------- closed forms ---

@pytest.mark.parametrize("psi,z,expected", [
    (ClosedFormPsi("power_delta", delta=0.5), 1j, cmath.exp(1j * math.pi / 4)),
    (rational(1.0, [1.0], [2.0]), 1.0, 1.5),
    (ClosedFormPsi("power_delta", delta=-0.5), 4.0, 0.5),
])
def test_closed_form_examples(psi, z, expected):
    assert closed_form_eval(psi, z) == pytest.approx(expected, rel=1e-14)


def test_closed_form_errors():
    with pytest.raises(PoleError):
        closed_form_eval(rational(1.0, [1.0], [2.0]), -1.0)
    with pytest.raises(DomainError):
        closed_form_eval(ClosedFormPsi("power_delta", delta=0.5), -2.0)


@pytest.mark.parametrize("delta", [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9])
def test_power_representation_agrees(delta, rng):
    psi = ClosedFormPsi("power_delta", delta=delta)
    z = upper_points(rng, 20)
    np.testing.assert_allclose(evaluate(closed_form_to_repr(psi), z), closed_form_eval(psi, z), rtol=1e-10)


# --------------------------------------------------------- partial fractions ---

def test_rational_single_pole():
    r = rational_to_repr(rational(1.0, [1.0], [2.0]))
    assert (r.a, r.b) == (1.0, 0.0)
    assert [(x.position, x.weight) for x in r.sigma.atoms] == [(1.0, pytest.approx(1.0))]


def test_rational_pole_at_origin():
    r = rational_to_repr(rational(1.0, [0.0], [2.0]))
    assert (r.a, r.b) == (1.0, pytest.approx(2.0)) and r.sigma.is_zero


def test_rational_weights_match_sympy_residues():
    z = sp.symbols("z")
    expr = 2 * (z + 2) * (z + 4) / ((z + 1) * (z + 3))
    oracle = {1.0: float(sp.residue(expr, z, -1)), 3.0: float(sp.residue(expr, z, -3))}
    assert oracle == {1.0: 3.0, 3.0: 1.0}
    r = rational_to_repr(rational(2.0, [1.0, 3.0], [2.0, 4.0]))
    assert r.a == 2.0
    for atom in r.sigma.atoms:
        assert atom.weight == pytest.approx(oracle[atom.position], rel=1e-14)


@pytest.mark.parametrize("poles,zeros", [([1.0, 2.0], [3.0]), ([2.0], [1.0]), ([1.0], [2.0, 3.0]), ([], [])])
def test_interlacing_violations(poles, zeros):
    with pytest.raises(InterlacingViolation):
        rational_to_repr(rational(1.0, poles, zeros))


@given(interlacing, st.integers(0, 2**32 - 1))
def test_rational_round_trip(data, seed):
    c, poles, zeros = data
    psi = rational(c, poles, zeros)
    z = upper_points(np.random.default_rng(seed), 20)
    ref = closed_form_eval(psi, z)
    np.testing.assert_allclose(evaluate(rational_to_repr(psi), z), ref, rtol=1e-10)


# ----------------------------------------------------------- membership ---

def test_membership_examples():
    assert membership_check(StieltjesRepr(S, 0.0, 1.0), S, grid=[1j]).passed
    rep = membership_check(ClosedFormPsi("power_delta", delta=0.5), S_INV, grid=[1j])
    assert rep.passed and closed_form_eval(ClosedFormPsi("power_delta", delta=0.5), 1j).imag > 0.7
    bad = membership_check(lambda z: -1.0 / z, S, grid=[1.0])
    assert not bad.passed and not bad.positivity_ok


def test_membership_wrong_tag_fails():
    assert not membership_check(ClosedFormPsi("power_delta", delta=0.5), S).passed


@given(interlacing)
def test_generic_rational_is_in_class_s(data):
    assert membership_check(rational(*data), S).passed


@given(interlacing)
def test_reciprocal_law(data):
    psi = rational(*data)
    tag, inv = class_of_combination("reciprocal", [S], [psi])
    assert tag == S_INV
    z = np.array([0.5 + 1j, 3j, 10 + 0.1j])
    np.testing.assert_allclose(inv(z), 1.0 / closed_form_eval(psi, z), rtol=1e-12)
    assert membership_check(inv, tag).passed


@pytest.mark.parametrize("psi", [
    StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY),
    StieltjesRepr(S, 0.2, 0.5, Measure.atom(2.0, 1.0)),
    StieltjesRepr(S_INV, 0.1, 0.3, Measure.atom(1.0, 1.0)),
    ClosedFormPsi("power_delta", delta=0.3),
])
def test_monotone_on_positive_axis(psi):
    x = np.logspace(-2, 3, 60)
    v = np.real(evaluate(psi, x) if isinstance(psi, StieltjesRepr) else closed_form_eval(psi, x))
    tag = psi.class_tag if isinstance(psi, StieltjesRepr) else S_INV
    assert np.all(np.diff(v) < 0) if tag == S else np.all(np.diff(v) > 0)


# -------------------------------------------------------- value at zero ---

@pytest.mark.parametrize("psi,expected", [
    (StieltjesRepr(S, 0.0, 1.0), math.inf),
    (StieltjesRepr(S_INV, 0.3, 0.0, Measure.atom(1.0, 1.0)), 0.3),
    (StieltjesRepr(S, 0.0, 0.0, Measure.atom(1.0, 1.0)), 1.0),
    (StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY), math.inf),
    (ClosedFormPsi("shifted_power", delta=-0.5, shift=0.25), 2.0),
])
def test_value_at_zero(psi, expected):
    assert value_at_zero(psi) == pytest.approx(expected)


# ------------------------------------------------------------- classify ---

@pytest.mark.parametrize("psi,expected", [
    (StieltjesRepr(S, 1.0, 2.0), "special"),
    (StieltjesRepr(S, 0.0, 0.0, Measure.atom(1.0, 1.0)), "generic"),
    (StieltjesRepr(S, 0.0, 1.0, INV_SQRT_DENSITY), "generic"),
    (rational(1.0, [0.0], [2.0]), "special"),
])
def test_classify(psi, expected):
    assert classify(psi) == expected


def test_constant_rejected():
    with pytest.raises(ConstantPsiError):
        classify(StieltjesRepr(S, 2.0, 0.0))


# ---------------------------------------------------------- closure laws ---

@pytest.mark.parametrize("op,tags,expected", [
    ("reciprocal", [S], S_INV),
    ("reciprocal", [S_INV], S),
    ("compose", [S, S], S_INV),
    ("compose", [S_INV, S_INV], S_INV),
    ("compose", [S, S_INV], S),
    ("compose", [S_INV, S], S),
    ("sum", [S, S], S),
    ("parallel", [S_INV, S_INV], S_INV),
])
def test_combination_tags(op, tags, expected):
    assert class_of_combination(op, tags) == expected


@pytest.mark.parametrize("op", ["sum", "parallel"])
def test_mixed_tags_rejected(op):
    with pytest.raises(MixedTagError):
        class_of_combination(op, [S, S_INV])


@pytest.mark.parametrize("op,tags", [
    ("sum", [S, S]), ("parallel", [S, S]), ("compose", [S, S]), ("compose", [S, S_INV]),
])
def test_derived_evaluators_satisfy_membership(op, tags):
    pool = {S: [ClosedFormPsi("power_delta", delta=-0.4), rational(1.0, [1.0], [2.0])],
            S_INV: [ClosedFormPsi("power_delta", delta=0.6)]}
    operands = [pool[tags[0]][0], pool[tags[1]][-1]]
    tag, derived = class_of_combination(op, tags, operands)
    assert membership_check(derived, tag).passed


# -------------------------------------------------------- growth bounds ---

def test_stated_constants_satisfy_sandwich():
    assert sandwich_holds(StieltjesRepr(S, 0.0, 1.0), 1.0, 1.0, 10_000)
    assert sandwich_holds(StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY), 1.0, 1.0, 200)
    assert sandwich_holds(StieltjesRepr(S_INV, 1.0, 1.0), 1.0, 2.0, 10_000)


@pytest.mark.parametrize("psi", [
    StieltjesRepr(S, 0.0, 1.0),
    StieltjesRepr(S, 0.0, 0.0, INV_SQRT_DENSITY),
    StieltjesRepr(S, 0.3, 0.0, Measure.atom(1.0, 1.0)),
    StieltjesRepr(S_INV, 1.0, 1.0),
    StieltjesRepr(S_INV, 0.0, 0.0, Measure.atom(1.0, 1.0)),
    ClosedFormPsi("power_delta", delta=-0.7),
    ClosedFormPsi("power_delta", delta=0.5),
])
def test_computed_bounds_satisfy_sandwich(psi):
    c1, c2 = coefficient_bounds(psi)
    assert 0 < c1 < c2
    assert sandwich_holds(psi, c1, c2, 10_000)
