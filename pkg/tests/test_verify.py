import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sci

from hurwitz_stable.corpora import kernel_specs, psi_fixture
from hurwitz_stable.errors import DomainError, HypothesisViolation, SpecialPsi
from hurwitz_stable.lp1 import LP1Function
from hurwitz_stable.measure import Measure
from hurwitz_stable.stieltjes import S, S_INV, StieltjesRepr
from hurwitz_stable.verify import (
    FAIL,
    PASS,
    DecreasingKernelSpec,
    FunctionKernel,
    SuiteParams,
    TabulatedKernel,
    im_transform_check,
    kernel_hypotheses,
    kernel_mass,
    mal_integral,
    mal_integral_direct,
    positivity_margin,
    run_suites,
    theorem1_suite,
    theorem2_suite,
)

from conftest import INV_SQRT_DENSITY

Y_VALUES = [0.1, 1.0, math.pi, 10.0, 100.0]


def corpus_kernel(i):
    d = kernel_specs()[i]
    return DecreasingKernelSpec(d["x"], d["b"], Measure.from_dict(d["measure"]))


# ----------------------------------------------------------- folding sum ---

def test_linear_kernel_antiderivative_oracle():
    u = FunctionKernel(lambda t: 1.0 - t)
    y = math.pi
    assert mal_integral(u, y) == pytest.approx((y - math.sin(y)) / y ** 2, abs=1e-10)
    assert mal_integral(u, y) == pytest.approx(1 / math.pi, abs=1e-10)


def test_truncated_exponential_is_positive():
    u = FunctionKernel(lambda t: np.exp(-t))
    oracle = sci.quad(lambda t: math.exp(-t) * math.sin(t), 0, 1)[0]
    assert mal_integral(u, 1.0) == pytest.approx(oracle, rel=1e-12) and oracle > 0


def test_flat_kernel_over_full_period_vanishes():
    u = FunctionKernel(lambda t: np.ones_like(t))
    assert not kernel_hypotheses(u).strictly_decreasing_near_zero
    assert mal_integral(u, 2 * math.pi) == pytest.approx(0.0, abs=1e-14)


def test_increasing_kernel_rejected():
    with pytest.raises(HypothesisViolation):
        mal_integral(FunctionKernel(lambda t: t), 1.0)


def test_non_positive_frequency_rejected():
    with pytest.raises(DomainError):
        mal_integral(FunctionKernel(lambda t: 1 - t), 0.0)


@pytest.mark.parametrize("i", range(0, 50, 7))
@pytest.mark.parametrize("y", Y_VALUES)
def test_folding_matches_direct_quadrature(i, y):
    u = corpus_kernel(i)
    assert mal_integral(u, y) == pytest.approx(mal_integral_direct(u, y), abs=1e-10)


@given(st.floats(0.0, 5.0), st.floats(0.0, 2.0), st.floats(0.05, 200.0))
def test_positive_for_decreasing_kernels(x, b, y):
    u = DecreasingKernelSpec(x, b, Measure.atom(1.5, 0.7) + INV_SQRT_DENSITY)
    assert mal_integral(u, y) > positivity_margin(u)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8), st.floats(0.1, 50.0))
def test_positive_for_tabulated_kernels(steps, y):
    vals = np.cumsum(steps)[::-1]
    t = np.linspace(0.0, 2.0, vals.size)
    u = TabulatedKernel(tuple(t), tuple(vals))
    assert mal_integral(u, y, support=2.0) > positivity_margin(u, 2.0)


def test_kernel_mass_and_margin():
    u = FunctionKernel(lambda t: 1.0 - t)
    assert kernel_mass(u) == pytest.approx(0.5, rel=1e-13)
    assert positivity_margin(u) == pytest.approx(0.5e-12)


# ------------------------------------------------------- imaginary parts ---

def test_im_identity_atom():
    chk = im_transform_check(StieltjesRepr(S, 0.0, 0.0, Measure.atom(1.0, 1.0)), 1j)
    assert abs(chk.lhs - chk.rhs) <= 1e-8 and chk.negative and chk.agrees


def test_im_identity_special():
    chk = im_transform_check(StieltjesRepr(S, 0.0, 1.0), 2 + 1j)
    assert chk.agrees and chk.negative


@pytest.mark.parametrize("name", ["inv_sqrt", "mixed", "rational_2_1"])
def test_im_identity_on_real_axis(name):
    chk = im_transform_check(psi_fixture(name), 1.7)
    assert chk.rhs == 0.0 and abs(chk.lhs) <= chk.budget


@pytest.mark.parametrize("z", [0.5 + 2j, 2 + 1j, 1 + 5j, 3 + 8j])
@pytest.mark.parametrize("name", ["inv_sqrt", "mixed", "atom_1_1"])
def test_im_identity_generic(name, z):
    chk = im_transform_check(psi_fixture(name), z)
    assert chk.agrees and chk.negative


@pytest.mark.parametrize("psi", [
    StieltjesRepr(S_INV, 0.0, 0.0, Measure.atom(1.0, 1.0)),
    StieltjesRepr(S_INV, 0.7, 0.3, Measure.atom(2.0, 0.5) + Measure.density(0.4, -0.5)),
    psi_fixture("sqrt"),
])
@pytest.mark.parametrize("z", [1j, 0.5 + 2j, 2 + 1j])
def test_im_identity_inverse_class(psi, z):
    chk = im_transform_check(psi, z)
    assert abs(chk.lhs - chk.rhs) <= 1e-8 and chk.negative


def test_im_identity_domain():
    with pytest.raises(DomainError):
        im_transform_check(psi_fixture("inv_sqrt"), -1 + 1j)


# ----------------------------------------------------------------- suites ---

def test_suite_inverse_sqrt():
    rep = theorem1_suite(psi_fixture("inv_sqrt"))
    assert rep.passed, rep.table()
    assert {c.clause for c in rep.clauses} >= {"E.class", "E.repr", "E.count", "E.verdict", "E.im"}


def test_suite_rational():
    rep = theorem1_suite(psi_fixture("rational_2_1"))
    assert rep.passed, rep.table()


def test_suite_value_zero_branch(sinv_atom_a0, one_plus_z_exp):
    rep = theorem2_suite(one_plus_z_exp, sinv_atom_a0)
    assert rep.passed, rep.table()
    assert rep.clause("F.root0").status == PASS


def test_suite_special_warns_and_expects_boundary():
    with pytest.warns(SpecialPsi):
        rep = theorem1_suite(psi_fixture("inv_z"))
    assert rep.passed and rep.verdict.verdict == "boundary"


def test_suite_report_fails_with_any_clause():
    rep = theorem1_suite(psi_fixture("atom_1_1"), SuiteParams(R=8.0, consistency_radius=5.0))
    assert rep.passed
    rep.add("extra", "deliberately failing clause", False, -1.0)
    assert not rep.passed and rep.clause("extra").status == FAIL
    assert len(rep.table().splitlines()) >= len(rep.clauses)


def test_theorem2_rejects_zero_at_origin():
    with pytest.raises(DomainError):
        theorem2_suite(LP1Function(1.0, 1, 1.0), psi_fixture("inv_sqrt"))


def test_suites_run_concurrently(one_plus_z_exp):
    jobs = [("theorem1", (psi_fixture(n),)) for n in ("inv_sqrt", "atom_1_1")]
    jobs.append(("theorem2", (one_plus_z_exp, psi_fixture("mixed"))))
    serial = run_suites(jobs, 1)
    parallel = run_suites(jobs, 3)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]
    assert all(r.passed for r in parallel)
