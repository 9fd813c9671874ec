import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hurwitz_stable import LP1Function, Measure, StieltjesRepr
from hurwitz_stable.corpora import psi_fixture
from hurwitz_stable.stieltjes import S, S_INV

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

INV_SQRT_DENSITY = Measure.density(1.0 / math.pi, -0.5)

GENERIC_S_FIXTURES = ["inv_sqrt", "atom_1_1", "rational_2_1", "mixed", "power_m0.3"]


@pytest.fixture
def inv_sqrt():
    return psi_fixture("inv_sqrt")


@pytest.fixture
def inv_z():
    return psi_fixture("inv_z")


@pytest.fixture
def atom_psi():
    return StieltjesRepr(S, 0.0, 0.0, Measure.atom(1.0, 1.0))


@pytest.fixture
def sinv_atom_a0():
    return StieltjesRepr(S_INV, 0.0, 0.0, Measure.atom(1.0, 1.0))


@pytest.fixture
def one_plus_z_exp():
    return LP1Function(1.0, 0, 1.0, (1.0,))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
