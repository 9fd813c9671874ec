"""Entire functions built from Stieltjes multipliers and LP-I base functions.

Given ``psi`` and ``F = sum f_k z**k`` the constructions are::

    shift1   F_psi(z)  = sum psi(k+1) f_k z**k     (psi in S)
    shift0   F_psi-(z) = sum psi(k)   f_k z**k     (psi in S_inv)

``F = exp(z)`` gives the exponential-series special case.  Each construction
is available as a certified Taylor truncation and, independently, through
its integral representation over ``t in (0, 1)``::

    shift1   a F(z) + int (b + phi(t)) F(tz) dt
    shift0   a F(z) + b z F'(z) + z int phi(t) F'(tz) dt
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DomainError, InfiniteValue, LengthMismatch, QuadratureFailure
from .lp1 import LP1Function, lp1_derivative, lp1_eval, lp1_taylor, tail_majorant
from .measure import phi_from_log, t_and_log_from_s, t_range_cutoff
from .quadrature import integrate, rule_on_partition
from .stieltjes import (
    S,
    S_INV,
    ClosedFormPsi,
    StieltjesRepr,
    closed_form_to_repr,
    coefficient_bounds,
    psi_eval,
    psi_tag,
    value_at_zero,
)

_EPS = np.finfo(float).eps
SHIFT1 = "shift1"
SHIFT0 = "shift0"


def default_kind(psi) -> str:
    return SHIFT1 if psi_tag(psi) == S else SHIFT0


def multiplier_sequence(psi, kind: str, N: int) -> np.ndarray:
    """``psi(k+1)`` (shift1) or ``psi(k)`` (shift0) for ``k = 0..N``."""
    if kind not in (SHIFT1, SHIFT0):
        raise DomainError(f"unknown multiplier kind {kind!r}")
    if N < 0:
        raise DomainError("N must be >= 0")
    if kind == SHIFT1:
        return np.real(np.asarray(psi_eval(psi, np.arange(1, N + 2, dtype=float))))
    psi0 = value_at_zero(psi)
    if math.isinf(psi0):
        raise InfiniteValue("psi(0) is infinite; the shift0 sequence is undefined")
    rest = np.real(np.asarray(psi_eval(psi, np.arange(1, N + 1, dtype=float)))) if N else np.empty(0)
    return np.concatenate([[psi0], rest])


def multiplier_growth(psi, kind: str) -> tuple[float, float]:
    """``(linear, offset)`` with ``multiplier_k <= linear*k + offset`` for every ``k >= 1``.

    Tag S multipliers are non-increasing, so the first one bounds the rest.
    For tag S_inv, ``psi(x)/x`` is non-increasing, so ``psi(k) <= psi(1) k``.
    """
    _, c2 = coefficient_bounds(psi)
    c2 *= 1.0 + 1e-12
    tag = psi_tag(psi)
    if tag == S:
        if kind == SHIFT1:
            return 0.0, c2
        return 0.0, max(c2, value_at_zero(psi) * (1.0 + 1e-12))
    if kind == SHIFT1:
        return c2, c2
    return c2, 0.0


@dataclass(frozen=True)
class TruncatedEntireFunction:
    """Coefficients ``c_0..c_N`` plus the data of a certified tail bound.

    The discarded tail satisfies
    ``sum_{k>N} |c_k| R^k <= tail_majorant(base, N, R, tail_linear, tail_c2)``,
    divided by ``R`` when ``deflated`` (the function is then ``T(z)/z``).
    A positive ``gain`` multiplies the whole function; keeping it apart from
    the coefficients makes scaling exact.
    """

    coeffs: np.ndarray
    alpha: float
    tail_c2: float
    tail_linear: float = 0.0
    base: LP1Function = field(default_factory=LP1Function.exp)
    deflated: bool = False
    label: str = ""
    gain: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @property
    def source_order(self) -> int:
        """Truncation order of the undeflated series."""
        return self.N + 1 if self.deflated else self.N

    def tail_bound(self, R) -> float:
        R = float(R)
        tb = tail_majorant(self.base, self.source_order, R, self.tail_linear, self.tail_c2)
        if self.deflated:
            return math.inf if R == 0 else self.gain * tb / R
        return self.gain * tb

    def roundoff(self, R) -> float:
        """Bound on accumulated Horner rounding error for ``|z| <= R``."""
        k = np.arange(self.coeffs.size)
        return 2.0 * (self.N + 1) * _EPS * self.gain * float(np.sum(np.abs(self.coeffs) * float(R) ** k))

    def derivative_coeffs(self) -> np.ndarray:
        return self.coeffs[1:] * np.arange(1, self.coeffs.size)

    def scaled(self, factor: float) -> "TruncatedEntireFunction":
        if not factor > 0:
            raise DomainError("scaling factor must be positive")
        return replace(self, gain=self.gain * factor)

    def deflate(self) -> "TruncatedEntireFunction":
        """``T(z)/z``; requires ``c_0 == 0`` exactly."""
        if self.deflated:
            raise DomainError("already deflated")
        if self.coeffs[0] != 0:
            raise DomainError("deflation needs c_0 == 0")
        return replace(self, coeffs=self.coeffs[1:], deflated=True)

    def __call__(self, z):
        return self.gain * horner(self.coeffs, z)

    def derivative(self, z):
        if self.N == 0:
            return np.zeros_like(np.asarray(z, complex))
        return self.gain * horner(self.derivative_coeffs(), z)

    def to_dict(self) -> dict:
        return {
            "coeffs": [float(c) for c in self.coeffs],
            "alpha": self.alpha,
            "tail_c2": self.tail_c2,
            "tail_linear": self.tail_linear,
            "N": self.N,
            "base": self.base.to_dict(),
            "deflated": self.deflated,
            "label": self.label,
            "gain": self.gain,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedEntireFunction":
        coeffs = np.asarray(data["coeffs"], dtype=float)
        if "N" in data and int(data["N"]) != coeffs.size - 1:
            raise LengthMismatch("N does not match the number of coefficients")
        base = data.get("base")
        return cls(coeffs, float(data["alpha"]), float(data["tail_c2"]),
                   float(data.get("tail_linear", 0.0)),
                   LP1Function.from_dict(base) if base else LP1Function.exp(float(data["alpha"])),
                   bool(data.get("deflated", False)), data.get("label", ""),
                   float(data.get("gain", 1.0)))


def horner(coeffs: np.ndarray, z):
    z_arr = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z_arr)
    for c in coeffs[::-1]:
        acc = acc * z_arr + c
    return complex(acc) if acc.ndim == 0 else acc


def build_entire(multipliers: Sequence[float], base_coeffs: Sequence[float], alpha: float, *,
                 base: LP1Function | None = None, growth: tuple[float, float] | None = None,
                 label: str = "") -> TruncatedEntireFunction:
    """Termwise product ``c_k = multiplier_k * f_k``.

    ``growth = (linear, offset)`` bounds the multipliers beyond the truncation;
    without it the largest supplied multiplier is used, which is valid for the
    non-increasing sequences of tag S.  ``base`` defaults to ``exp(alpha z)``.
    """
    mult = np.asarray(multipliers, dtype=float)
    f = np.asarray(base_coeffs, dtype=float)
    if mult.shape != f.shape:
        raise LengthMismatch(f"{mult.size} multipliers for {f.size} base coefficients")
    if growth is None:
        growth = (0.0, float(np.max(np.abs(mult))) if mult.size else 0.0)
    if base is None:
        base = LP1Function.exp(alpha)
    return TruncatedEntireFunction(mult * f, float(alpha), float(growth[1]), float(growth[0]),
                                   base, False, label)


def _check_base(F: LP1Function) -> None:
    if F.m != 0:
        raise DomainError("the base function must not vanish at 0 (m = 0 required)")


def construct_entire(psi, F: LP1Function | None = None, N: int | None = None, *,
                     kind: str | None = None, R: float | None = None, tau: float = 1e-12,
                     deflate: bool = False) -> TruncatedEntireFunction:
    """Build ``F_psi`` (or its exponential special case) as a certified truncation.

    Either ``N`` is given or it is chosen for radius ``R`` and tolerance ``tau``.
    With ``deflate=True`` the function ``F_psi(z)/z`` is returned; this needs
    ``psi(0) = 0`` with the shift0 sequence.
    """
    F = LP1Function.exp(1.0) if F is None else F
    _check_base(F)
    kind = kind or default_kind(psi)
    if N is None:
        if R is None:
            raise DomainError("give either N or a radius R")
        N = choose_truncation(psi, F, R, tau, kind=kind)
    mult = multiplier_sequence(psi, kind, N)
    T = build_entire(mult, lp1_taylor(F, N), F.alpha, base=F,
                     growth=multiplier_growth(psi, kind), label=f"{kind}")
    return T.deflate() if deflate else T


def choose_truncation(psi, F: LP1Function, R: float, tau: float = 1e-12, *,
                      kind: str | None = None, max_order: int = 20000) -> int:
    """Smallest ``N`` whose certified tail at radius ``R`` is at most ``tau``."""
    kind = kind or default_kind(psi)
    linear, offset = multiplier_growth(psi, kind)
    N = len(F.deltas)
    while tail_majorant(F, N, R, linear, offset) > tau:
        N += 1
        if N > max_order:
            raise DomainError(f"no truncation below order {max_order} meets tau={tau} at R={R}")
    return N


def eval_taylor(T: TruncatedEntireFunction, z):
    """``(value, abs_error)`` with ``abs_error`` the certified tail at ``|z|``."""
    val = T(z)
    r = np.abs(np.asarray(z))
    if r.ndim == 0:
        return val, T.tail_bound(float(r))
    return val, np.array([T.tail_bound(x) for x in r.ravel()]).reshape(r.shape)


# ------------------------------------------------- integral representation ---

def _as_repr(psi) -> StieltjesRepr:
    if isinstance(psi, StieltjesRepr):
        return psi
    if isinstance(psi, ClosedFormPsi):
        return closed_form_to_repr(psi)
    raise DomainError("integral representation needs an explicit (a, b, sigma) representation")


_S_BREAKS = (1e-6, 1e-3, 0.03, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)


class _RepIntegrand:
    """Integrand in ``s`` with ``t = 1 - exp(-s)``, vectorised over ``z``."""

    def __init__(self, psi: StieltjesRepr, F: LP1Function, kind: str):
        self.psi, self.F, self.kind = psi, F, kind
        self.s_max = t_range_cutoff(psi.sigma) if not psi.sigma.is_zero else 46.0

    def weight(self, s):
        t, L = t_and_log_from_s(s)
        phi = phi_from_log(self.psi.sigma, L) if not self.psi.sigma.is_zero else np.zeros_like(s)
        if self.kind == SHIFT1:
            phi = phi + self.psi.b
        return t, np.exp(-s) * phi

    def values(self, t, w, z, derivative: int = 0):
        """Integrand columns at nodes ``t`` (rows) for points ``z`` (columns)."""
        tz = np.outer(t, z)
        F = self.F
        if self.kind == SHIFT1:
            if derivative == 0:
                return w[:, None] * lp1_eval(F, tz)
            return w[:, None] * t[:, None] * lp1_derivative(F, tz, 1)
        if derivative == 0:
            return w[:, None] * z[None, :] * lp1_derivative(F, tz, 1)
        return w[:, None] * (lp1_derivative(F, tz, 1) + tz * lp1_derivative(F, tz, 2))

    def outer_terms(self, z, derivative: int = 0):
        psi, F = self.psi, self.F
        if derivative == 0:
            out = psi.a * lp1_eval(F, z)
            if self.kind == SHIFT0 and psi.b:
                out = out + psi.b * z * lp1_derivative(F, z, 1)
            return out
        out = psi.a * lp1_derivative(F, z, 1)
        if self.kind == SHIFT0 and psi.b:
            out = out + psi.b * (lp1_derivative(F, z, 1) + z * lp1_derivative(F, z, 2))
        return out


def _check_kind(psi: StieltjesRepr, kind: str) -> None:
    if psi.class_tag == S and kind != SHIFT1:
        raise DomainError("the integral representation for tag S uses the shift1 sequence")
    if psi.class_tag == S_INV and kind != SHIFT0:
        raise DomainError("the integral representation for tag S_inv uses the shift0 sequence")


def eval_integral_rep(psi, F: LP1Function | None, z, *, rel_tol: float = 1e-12,
                      chunk: int = 64, return_error: bool = False):
    """``F_psi(z)`` (tag S) or ``F_psi-(z)`` (tag S_inv) by adaptive quadrature in ``t``."""
    psi = _as_repr(psi)
    F = LP1Function.exp(1.0) if F is None else F
    _check_base(F)
    kind = default_kind(psi)
    _check_kind(psi, kind)
    z_arr = np.asarray(z, dtype=complex)
    flat = z_arr.ravel()
    rep = _RepIntegrand(psi, F, kind)
    out = rep.outer_terms(flat).astype(complex)
    err = np.zeros(flat.size)
    for start in range(0, flat.size, chunk):
        zc = flat[start:start + chunk]

        def f(s, zc=zc):
            t, w = rep.weight(s)
            return rep.values(t, w, zc)

        res = integrate(f, 0.0, rep.s_max, breakpoints=_S_BREAKS,
                        rel_tol=rel_tol, abs_tol=1e-300, max_level=50)
        if not res.converged:
            raise QuadratureFailure(
                f"integral representation did not converge (error {np.max(res.error):.2e})")
        out[start:start + chunk] += np.atleast_1d(res.value)
        err[start:start + chunk] = np.atleast_1d(res.error)
    out = out.reshape(z_arr.shape)
    err = err.reshape(z_arr.shape)
    if z_arr.ndim == 0:
        out, err = complex(out), float(err)
    return (out, err) if return_error else out


class RepresentationEvaluator:
    """Fixed-node version of :func:`eval_integral_rep` for repeated evaluation.

    The node set is the adaptive partition obtained for a set of probe points
    (by default circles of radius ``R``, ``R/2``, ``R/4`` and both coordinate
    axes), so every point of modulus at most ``R`` is resolved about as well
    as the probes.  Values carry the Kronrod-minus-Gauss error indicator.
    Unlike a truncated Taylor series, the cost and accuracy do not depend on
    how large the coefficients grow, which matters once ``|z|`` reaches a few
    dozen in the left half-plane.
    """

    def __init__(self, psi, F: LP1Function | None = None, R: float = 60.0, *,
                 rel_tol: float = 1e-11, probes=None):
        self.psi = _as_repr(psi)
        self.F = LP1Function.exp(1.0) if F is None else F
        _check_base(self.F)
        self.kind = default_kind(self.psi)
        _check_kind(self.psi, self.kind)
        self.R = float(R)
        self._rep = _RepIntegrand(self.psi, self.F, self.kind)
        if probes is None:
            th = np.linspace(0, 2 * np.pi, 48, endpoint=False)
            rings = np.concatenate([r * np.exp(1j * th) for r in (R, R / 2, R / 4)])
            axis = np.linspace(-R, R, 33)
            probes = np.concatenate([rings, 1j * axis, axis[axis != 0]])
        probes = np.asarray(probes, dtype=complex)

        def f(s):
            t, w = self._rep.weight(s)
            return self._rep.values(t, w, probes)

        res = integrate(f, 0.0, self._rep.s_max, breakpoints=_S_BREAKS,
                        rel_tol=rel_tol, abs_tol=1e-300, max_level=50)
        self.converged = res.converged
        x, wk, wg = rule_on_partition(res.intervals)
        t, w = self._rep.weight(x)
        self.t, self.w, self.wk, self.wd = t, w, wk, wk - wg
        self.n_nodes = x.size

    def _apply(self, z, derivative: int):
        z_arr = np.asarray(z, dtype=complex)
        flat = z_arr.ravel()
        val = np.empty(flat.size, dtype=complex)
        err = np.empty(flat.size)
        step = max(1, 2_000_000 // max(self.n_nodes, 1))
        for start in range(0, flat.size, step):
            zc = flat[start:start + step]
            vals = self._rep.values(self.t, self.w, zc, derivative)
            val[start:start + step] = self.wk @ vals + self._rep.outer_terms(zc, derivative)
            err[start:start + step] = np.abs(self.wd @ vals)
        return val.reshape(z_arr.shape), err.reshape(z_arr.shape)

    def __call__(self, z):
        val, _ = self._apply(z, 0)
        return complex(val) if val.ndim == 0 else val

    def with_error(self, z):
        return self._apply(z, 0)

    def derivative(self, z):
        val, _ = self._apply(z, 1)
        return complex(val) if val.ndim == 0 else val


def representation_consistency(psi, F: LP1Function | None, sample_points, *,
                               T: TruncatedEntireFunction | None = None,
                               tail_rtol: float = 1e-10) -> float:
    """Largest relative gap between the Taylor and integral evaluations.

    Points failing the tail precondition ``tail(|z|) <= tail_rtol * |value|``
    are skipped; a :class:`DomainError` is raised if none remain.
    """
    F = LP1Function.exp(1.0) if F is None else F
    z = np.atleast_1d(np.asarray(sample_points, dtype=complex))
    if T is None:
        R = float(np.max(np.abs(z)))
        T = construct_entire(psi, F, R=max(R, 1.0), tau=1e-16)
    taylor, tail = eval_taylor(T, z)
    integral = eval_integral_rep(psi, F, z)
    ok = tail <= tail_rtol * np.abs(taylor)
    if not np.any(ok):
        raise DomainError("no sample point satisfies the truncation precondition")
    gap = np.abs(taylor - integral) / (np.abs(integral) + 1e-300)
    return float(np.max(gap[ok]))
