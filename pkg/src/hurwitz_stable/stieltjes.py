"""Stieltjes-class functions: integral representations, closed forms, closure laws.

Two tags are supported::

    S      psi(z) = a + b/z + int dsigma(lam) / (lam + z)
    S_inv  psi(z) = a + b*z + int z dsigma(lam) / (lam + z)

with ``a, b >= 0`` and ``sigma`` a :class:`~hurwitz_stable.measure.Measure`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConstantPsiError,
    DegenerateError,
    DomainError,
    InterlacingViolation,
    MixedTagError,
    PoleError,
)
from .measure import Atom, Measure, cauchy_transform, reciprocal_moment, validate_measure

S = "S"
S_INV = "S_inv"
TAGS = (S, S_INV)

_CUT_TOL = 1e-14


def _flip(tag: str) -> str:
    return S_INV if tag == S else S


def _check_tag(tag: str) -> str:
    if tag in ("S^-1", "Sinv", "S-1"):
        tag = S_INV
    if tag not in TAGS:
        raise DomainError(f"unknown class tag {tag!r}")
    return tag


def _check_off_cut(z: np.ndarray) -> None:
    on_cut = (np.abs(z.imag) <= _CUT_TOL) & (z.real <= _CUT_TOL)
    if np.any(on_cut):
        raise DomainError(f"point {complex(z[on_cut][0])} lies on the cut (-inf, 0]")


def _as_points(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _finish(values: np.ndarray, scalar: bool):
    return complex(values.reshape(-1)[0]) if scalar else values


@dataclass(frozen=True)
class StieltjesRepr:
    class_tag: str
    a: float = 0.0
    b: float = 0.0
    sigma: Measure = field(default_factory=Measure)

    def __post_init__(self):
        object.__setattr__(self, "class_tag", _check_tag(self.class_tag))
        if not (self.a >= 0 and self.b >= 0) or not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"a and b must be finite and non-negative, got a={self.a}, b={self.b}")
        if self.a == 0 and self.b == 0 and self.sigma.is_zero:
            raise DegenerateError("psi is identically zero")

    @property
    def is_special(self) -> bool:
        return self.sigma.is_zero

    def __call__(self, z):
        return evaluate(self, z)

    def to_dict(self) -> dict:
        return {"class": self.class_tag, "a": self.a, "b": self.b, "sigma": self.sigma.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "StieltjesRepr":
        return cls(data["class"], float(data.get("a", 0.0)), float(data.get("b", 0.0)),
                   Measure.from_dict(data.get("sigma")))


def evaluate(psi: StieltjesRepr, z):
    """Value of the representation at ``z`` (scalar or array) off the cut."""
    pts, scalar = _as_points(z)
    flat = pts.reshape(-1)
    _check_off_cut(flat)
    if psi.class_tag == S:
        out = psi.a + psi.b / flat + cauchy_transform(psi.sigma, flat)
    else:
        out = psi.a + psi.b * flat + cauchy_transform(psi.sigma, flat, inverse=True)
    return _finish(out.reshape(pts.shape), scalar)


eval = evaluate  # noqa: A001  (public name used throughout the docs)


# ------------------------------------------------------------ closed forms ---

CLOSED_KINDS = ("power_delta", "rational_interlacing", "special_S", "special_Sinv", "shifted_power")


@dataclass(frozen=True)
class ClosedFormPsi:
    """Explicit Stieltjes functions.

    ``power_delta``            z**delta, -1 < delta < 1, delta != 0
    ``shifted_power``          (z + shift)**delta, -1 < delta < 0, shift > 0
    ``rational_interlacing``   c * prod(z + zeros) / prod(z + poles)
    ``special_S``              a + b/z
    ``special_Sinv``           a + b*z
    """

    kind: str
    delta: float = 0.0
    c: float = 1.0
    poles: tuple[float, ...] = ()
    zeros: tuple[float, ...] = ()
    a: float = 0.0
    b: float = 0.0
    shift: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(float(p) for p in self.poles))
        object.__setattr__(self, "zeros", tuple(float(p) for p in self.zeros))
        if self.kind not in CLOSED_KINDS:
            raise DomainError(f"unknown closed form {self.kind!r}")
        if self.kind == "power_delta" and not (-1 < self.delta < 1 and self.delta != 0):
            raise DomainError(f"power needs -1 < delta < 1, delta != 0; got {self.delta}")
        if self.kind == "shifted_power" and not (-1 < self.delta < 0 and self.shift > 0):
            raise DomainError("shifted power needs -1 < delta < 0 and shift > 0")
        if self.kind == "rational_interlacing":
            check_interlacing(self.poles, self.zeros)
            if not self.c > 0:
                raise DomainError("rational form needs c > 0")
        if self.kind in ("special_S", "special_Sinv"):
            if not (self.a >= 0 and self.b >= 0) or self.a + self.b == 0:
                raise DomainError("special form needs a, b >= 0, not both zero")

    @property
    def class_tag(self) -> str:
        if self.kind == "power_delta":
            return S if self.delta < 0 else S_INV
        return S_INV if self.kind == "special_Sinv" else S

    def __call__(self, z):
        return closed_form_eval(self, z)

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind in ("power_delta", "shifted_power"):
            d["delta"] = self.delta
        if self.kind == "shifted_power":
            d["shift"] = self.shift
        if self.kind == "rational_interlacing":
            d.update(c=self.c, poles=list(self.poles), zeros=list(self.zeros))
        if self.kind in ("special_S", "special_Sinv"):
            d.update(a=self.a, b=self.b)
        return {"closed_form": d}

    @classmethod
    def from_dict(cls, data: dict) -> "ClosedFormPsi":
        d = data.get("closed_form", data)
        return cls(
            kind=d["kind"],
            delta=float(d.get("delta", 0.0)),
            c=float(d.get("c", 1.0)),
            poles=tuple(d.get("poles", ())),
            zeros=tuple(d.get("zeros", ())),
            a=float(d.get("a", 0.0)),
            b=float(d.get("b", 0.0)),
            shift=float(d.get("shift", 0.0)),
        )


def check_interlacing(poles: Sequence[float], zeros: Sequence[float]) -> None:
    """Require ``0 <= a0 < b0 < a1 < b1 < ...`` with one more pole than zeros, or equally many."""
    if len(poles) == 0:
        raise InterlacingViolation("at least one pole is required")
    if len(zeros) not in (len(poles), len(poles) - 1):
        raise InterlacingViolation("need as many zeros as poles, or one fewer")
    merged = [None] * (len(poles) + len(zeros))
    merged[::2] = poles
    merged[1::2] = zeros
    if merged[0] < 0 or any(not (x < y) for x, y in zip(merged, merged[1:])):
        raise InterlacingViolation(f"poles {list(poles)} and zeros {list(zeros)} do not interlace")


def closed_form_eval(psi: ClosedFormPsi, z):
    pts, scalar = _as_points(z)
    flat = pts.reshape(-1)
    kind = psi.kind
    if kind == "power_delta":
        _check_off_cut(flat)
        out = np.exp(psi.delta * np.log(flat))
    elif kind == "shifted_power":
        _check_off_cut(flat + psi.shift)
        out = np.exp(psi.delta * np.log(flat + psi.shift))
    elif kind == "rational_interlacing":
        den = np.ones_like(flat)
        for p in psi.poles:
            den = den * (flat + p)
        if np.any(den == 0):
            raise PoleError("evaluation at a pole of the rational function")
        num = np.full_like(flat, psi.c)
        for q in psi.zeros:
            num = num * (flat + q)
        out = num / den
    elif kind == "special_S":
        if np.any(flat == 0) and psi.b > 0:
            raise PoleError("a + b/z has a pole at 0")
        _check_off_cut(flat)
        out = psi.a + psi.b / flat
    else:
        _check_off_cut(flat)
        out = psi.a + psi.b * flat
    return _finish(out.reshape(pts.shape), scalar)


def power_to_repr(delta: float) -> StieltjesRepr:
    """Representation of the principal power ``z**delta``."""
    if -1 < delta < 0:
        return StieltjesRepr(S, sigma=Measure.density(math.sin(math.pi * -delta) / math.pi, delta))
    if 0 < delta < 1:
        return StieltjesRepr(S_INV, sigma=Measure.density(math.sin(math.pi * delta) / math.pi, delta - 1.0))
    raise DomainError(f"z**{delta} is not of Stieltjes type")


def rational_to_repr(psi: ClosedFormPsi) -> StieltjesRepr:
    """Partial-fraction form of an interlacing rational function.

    Each pole ``-a_k`` contributes an atom at ``a_k`` whose weight is the
    (positive) residue there; a pole at 0 becomes the ``b/z`` term.
    """
    if psi.kind != "rational_interlacing":
        raise DomainError("rational_to_repr needs a rational_interlacing closed form")
    poles, zeros, c = psi.poles, psi.zeros, psi.c
    a = c if len(zeros) == len(poles) else 0.0
    b = 0.0
    atoms = []
    for k, ak in enumerate(poles):
        res = c
        for q in zeros:
            res *= q - ak
        for j, aj in enumerate(poles):
            if j != k:
                res /= aj - ak
        if res <= 0:
            raise InterlacingViolation(f"non-positive residue {res} at pole {-ak}")
        if ak == 0:
            b = res
        else:
            atoms.append((ak, res))
    return StieltjesRepr(S, a, b, Measure(tuple(Atom(p, w) for p, w in atoms)))


def closed_form_to_repr(psi: ClosedFormPsi) -> StieltjesRepr:
    if psi.kind == "power_delta":
        return power_to_repr(psi.delta)
    if psi.kind == "rational_interlacing":
        return rational_to_repr(psi)
    if psi.kind == "special_S":
        return StieltjesRepr(S, psi.a, psi.b)
    if psi.kind == "special_Sinv":
        return StieltjesRepr(S_INV, psi.a, psi.b)
    raise DomainError(f"{psi.kind} has no representation in the parametric measure family")


def psi_from_dict(data: dict):
    """Parse either a closed form or an explicit ``(class, a, b, sigma)`` representation."""
    if "closed_form" in data:
        return ClosedFormPsi.from_dict(data)
    if "class" not in data:
        raise DomainError("psi spec needs 'class' or 'closed_form'")
    return StieltjesRepr.from_dict(data)


# --------------------------------------------------------------- queries ---

def psi_tag(psi) -> str:
    tag = getattr(psi, "class_tag", None)
    if tag is None:
        raise DomainError("cannot determine the class tag of this evaluator")
    return tag


def psi_eval(psi, z):
    """Evaluate any supported psi object (representation, closed form, derived, callable)."""
    if isinstance(psi, StieltjesRepr):
        return evaluate(psi, z)
    if isinstance(psi, ClosedFormPsi):
        return closed_form_eval(psi, z)
    return psi(z)


def value_at_zero(psi) -> float:
    """``lim_{t -> 0+} psi(t)``, possibly ``inf``."""
    if isinstance(psi, ClosedFormPsi):
        if psi.kind == "shifted_power":
            return psi.shift ** psi.delta
        if psi.kind == "power_delta":
            return math.inf if psi.delta < 0 else 0.0
        if psi.kind == "special_Sinv":
            return psi.a
        if psi.kind == "special_S":
            return math.inf if psi.b > 0 else psi.a
        return value_at_zero(rational_to_repr(psi))
    if psi.class_tag == S_INV:
        return psi.a
    if psi.b > 0:
        return math.inf
    return psi.a + reciprocal_moment(psi.sigma)


def classify(psi: StieltjesRepr) -> str:
    """``special`` when the representing measure vanishes, ``generic`` otherwise."""
    if isinstance(psi, ClosedFormPsi):
        if psi.kind == "shifted_power":
            return "generic"
        psi = closed_form_to_repr(psi)
    if psi.sigma.is_zero:
        if psi.b == 0:
            raise ConstantPsiError(f"psi is the constant {psi.a}")
        return "special"
    return "generic"


def coefficient_bounds(psi) -> tuple[float, float]:
    """Constants ``0 < c1 < c2`` for the growth sandwich of ``psi`` at the integers.

    For tag S, ``c1/(k+1) <= psi(k+1) <= c2`` for ``k >= 0``; for tag S_inv,
    ``c1 <= psi(k) <= c2*k`` for ``k >= 1``.  Both follow from monotonicity:
    ``psi`` decreases (S) or increases (S_inv) on the positive axis, while
    ``x*psi(x)`` increases (S) or ``psi(x)/x`` decreases (S_inv).  Hence
    ``psi(1)`` works on both sides; ``c1`` is halved to make the pair strict.
    """
    p1 = float(np.real(psi_eval(psi, 1.0)))
    if not p1 > 0:
        raise DegenerateError("psi(1) must be positive")
    return 0.5 * p1, p1


def sandwich_holds(psi, c1: float, c2: float, k_max: int, rtol: float = 1e-12) -> bool:
    """Direct check of the coefficient sandwich for ``k`` up to ``k_max``."""
    tag = psi_tag(psi)
    if tag == S:
        k = np.arange(0, k_max + 1, dtype=float)
        v = np.real(psi_eval(psi, k + 1.0))
        return bool(np.all(c1 / (k + 1) <= v * (1 + rtol)) and np.all(v <= c2 * (1 + rtol)))
    k = np.arange(1, k_max + 1, dtype=float)
    v = np.real(psi_eval(psi, k))
    return bool(np.all(c1 <= v * (1 + rtol)) and np.all(v <= c2 * k * (1 + rtol)))


# ------------------------------------------------------------ membership ---

@dataclass
class MembershipReport:
    tag: str
    passed: bool
    positivity_ok: bool
    sign_ok: bool
    worst_point: complex | None
    worst_value: float
    failures: list = field(default_factory=list)


def default_grid() -> np.ndarray:
    r = np.logspace(-3, 3, 13)
    theta = np.linspace(0.0, math.pi - 1e-2, 12)[1:]
    upper = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    return np.concatenate([np.logspace(-3, 3, 25).astype(complex), upper])


def membership_check(psi: Callable, tag: str, grid=None, slack: float = 1e-12) -> MembershipReport:
    """Sample the defining sign conditions of class ``tag``.

    Positive-axis points must give ``psi(x) > 0``; upper half-plane points must
    give ``Im psi <= slack`` (S) or ``Im psi >= -slack`` (S_inv).
    """
    tag = _check_tag(tag)
    pts = default_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    failures = []
    worst_point, worst_value = None, -math.inf
    positivity_ok = sign_ok = True
    for z in pts:
        v = complex(psi_eval(psi, z))
        if z.imag == 0 and z.real > 0:
            margin = -v.real
            if not v.real > 0:
                positivity_ok = False
                failures.append((z, "positivity", v))
        elif z.imag > 0:
            margin = v.imag - slack if tag == S else -v.imag - slack
            if margin > 0:
                sign_ok = False
                failures.append((z, "imaginary sign", v))
        else:
            continue
        if margin > worst_value:
            worst_point, worst_value = z, margin
    return MembershipReport(tag, positivity_ok and sign_ok, positivity_ok, sign_ok,
                            worst_point, worst_value, failures)


# --------------------------------------------------------- closure algebra ---

@dataclass(frozen=True)
class DerivedPsi:
    """Pointwise combination of Stieltjes evaluators with its resulting class."""

    class_tag: str
    op: str
    operands: tuple

    def __call__(self, z):
        vals = [psi_eval(p, z) for p in self.operands]
        if self.op == "sum":
            return vals[0] + vals[1]
        if self.op == "parallel":
            return 1.0 / (1.0 / vals[0] + 1.0 / vals[1])
        if self.op == "reciprocal":
            return 1.0 / vals[0]
        # compose: outer(inner(z))
        return psi_eval(self.operands[0], vals[1])


_ARITY = {"sum": 2, "parallel": 2, "reciprocal": 1, "compose": 2}


def class_of_combination(op: str, tags: Sequence[str], operands: Sequence | None = None):
    """Class of ``sum``, ``parallel``, ``reciprocal`` or ``compose`` (outer, inner).

    Returns the resulting tag, or ``(tag, DerivedPsi)`` when operand evaluators
    are supplied.
    """
    if op not in _ARITY:
        raise DomainError(f"unknown operation {op!r}")
    tags = [_check_tag(t) for t in tags]
    if len(tags) != _ARITY[op]:
        raise DomainError(f"{op} takes {_ARITY[op]} operand(s)")
    if op in ("sum", "parallel"):
        if tags[0] != tags[1]:
            raise MixedTagError(f"{op} needs a common class, got {tags}")
        tag = tags[0]
    elif op == "reciprocal":
        tag = _flip(tags[0])
    else:
        tag = S_INV if tags[0] == tags[1] else S
    if operands is None:
        return tag
    return tag, DerivedPsi(tag, op, tuple(operands))


def is_constant(psi, tol: float = 1e-14) -> bool:
    v1, v2 = complex(psi_eval(psi, 1.0)), complex(psi_eval(psi, 2.0))
    return abs(v1 - v2) <= tol * max(abs(v1), abs(v2), 1e-300)


def l1_weight(psi: StieltjesRepr) -> float:
    """``int dsigma/(lam+1)`` of the representing measure."""
    return validate_measure(psi.sigma) if not psi.sigma.is_zero else 0.0
