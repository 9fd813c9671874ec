"""Hurwitz-stable entire functions built from Stieltjes multipliers.

Modules:

* :mod:`.measure` - measures on (0, inf) and the kernel ``phi``
* :mod:`.stieltjes` - Stieltjes-class functions, classification, closure laws
* :mod:`.lp1` - Laguerre-Polya class I base functions
* :mod:`.construct` - multiplier sequences, truncations, integral representations
* :mod:`.stability` - zero counting, roots, indicator and verdicts
* :mod:`.verify` - direct checks of the analytic identities and theorem suites
"""

from .construct import (
    SHIFT0,
    SHIFT1,
    RepresentationEvaluator,
    TruncatedEntireFunction,
    build_entire,
    choose_truncation,
    construct_entire,
    eval_integral_rep,
    eval_taylor,
    multiplier_sequence,
    representation_consistency,
)
from .lp1 import LP1Function, lp1_eval, lp1_taylor
from .measure import (
    Atom,
    DensityPiece,
    Measure,
    kernel_gram,
    phi_l1_norm,
    phi_sigma,
    validate_measure,
)
from .stability import (
    StabilityReport,
    VerdictParams,
    count_zeros_right_half,
    hurwitz_verdict,
    poly_roots,
    routh_hurwitz,
)
from .stieltjes import (
    S,
    S_INV,
    ClosedFormPsi,
    StieltjesRepr,
    class_of_combination,
    classify,
    closed_form_eval,
    membership_check,
    rational_to_repr,
    value_at_zero,
)
from .verify import (
    DecreasingKernelSpec,
    im_transform_check,
    mal_integral,
    theorem1_suite,
    theorem2_suite,
)

__version__ = "0.1.0"

__all__ = [
    "Atom", "ClosedFormPsi", "DecreasingKernelSpec", "DensityPiece", "LP1Function", "Measure",
    "RepresentationEvaluator", "S", "SHIFT0", "SHIFT1", "S_INV", "StabilityReport",
    "StieltjesRepr", "TruncatedEntireFunction", "VerdictParams", "build_entire",
    "choose_truncation", "class_of_combination", "classify", "closed_form_eval",
    "construct_entire", "count_zeros_right_half", "eval_integral_rep", "eval_taylor",
    "hurwitz_verdict", "im_transform_check", "kernel_gram", "lp1_eval", "lp1_taylor",
    "mal_integral", "membership_check", "multiplier_sequence", "phi_l1_norm", "phi_sigma",
    "poly_roots", "rational_to_repr", "representation_consistency", "routh_hurwitz",
    "theorem1_suite", "theorem2_suite", "validate_measure", "value_at_zero",
]
