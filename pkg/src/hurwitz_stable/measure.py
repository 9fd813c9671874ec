"""Finite non-negative measures on (0, inf) and their Laplace-type kernel.

A :class:`Measure` is a finite list of point masses plus parametric density
pieces ``c * lam**p * exp(-q*lam)`` on ``(lo, hi]``.  Every integral against
a density piece is computed in the variable ``x = log(lam)``, which turns the
algebraic endpoint behaviour at 0 and at infinity into exponential decay, so
one adaptive rule covers scales from 1e-300 to 1e+300.  The range is cut
where the integrand envelope drops below ``exp(-46)`` of its peak; slowly
decaying algebraic tails beyond ``lam = exp(690)`` are added in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from .errors import DegenerateError, DivergentMeasure, DomainError, NonPositiveWeight
from .quadrature import integrate

REL_TOL = 1e-13
ABS_TOL = 1e-15

_LOG_FLOOR = -46.0
_X_GRID = np.arange(-800.0, 690.0 + 0.25, 0.25)
_X_CAP = 690.0
_X_BOTTOM = -800.0


@dataclass(frozen=True)
class Atom:
    position: float
    weight: float

    def __post_init__(self):
        if not (self.position > 0 and math.isfinite(self.position)):
            raise DomainError(f"atom position must be a finite positive number, got {self.position}")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise NonPositiveWeight(f"atom weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class DensityPiece:
    """Density ``scale * lam**power * exp(-decay*lam)`` on ``(lo, hi]``."""

    lo: float
    hi: float
    scale: float
    power: float
    decay: float = 0.0

    def __post_init__(self):
        if not self.lo >= 0 or not self.hi > self.lo:
            raise DomainError(f"density piece needs 0 <= lo < hi, got ({self.lo}, {self.hi})")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise NonPositiveWeight(f"density scale must be positive, got {self.scale}")
        if not self.decay >= 0:
            raise DomainError(f"decay must be non-negative, got {self.decay}")
        if self.lo == 0 and not self.power > -1:
            raise DivergentMeasure(f"lam**{self.power} is not integrable at 0")
        if math.isinf(self.hi) and self.decay == 0 and not self.power < 0:
            raise DivergentMeasure(
                f"lam**{self.power} on an unbounded range violates int dsigma/(1+lam) < inf"
            )

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.hi)


@dataclass(frozen=True)
class Measure:
    atoms: tuple[Atom, ...] = field(default_factory=tuple)
    pieces: tuple[DensityPiece, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def atom(cls, position: float, weight: float = 1.0) -> "Measure":
        return cls(atoms=(Atom(position, weight),))

    @classmethod
    def density(cls, scale: float, power: float, decay: float = 0.0,
                lo: float = 0.0, hi: float = math.inf) -> "Measure":
        return cls(pieces=(DensityPiece(lo, hi, scale, power, decay),))

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.pieces

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.atoms + other.atoms, self.pieces + other.pieces)

    def scaled(self, factor: float) -> "Measure":
        return Measure(
            tuple(Atom(a.position, a.weight * factor) for a in self.atoms),
            tuple(DensityPiece(p.lo, p.hi, p.scale * factor, p.power, p.decay) for p in self.pieces),
        )

    def endpoint_exponent(self) -> float:
        """Exponent ``beta`` with ``phi(t) = O((1-t)**-beta)`` as ``t -> 1``.

        Only unbounded, undamped pieces make the kernel blow up at 1.
        """
        beta = 0.0
        for p in self.pieces:
            if p.unbounded and p.decay == 0:
                beta = max(beta, p.power + 1.0 if p.power > -1 else 0.05)
        return beta

    def to_dict(self) -> dict:
        return {
            "atoms": [{"lambda": a.position, "weight": a.weight} for a in self.atoms],
            "pieces": [
                {"lo": p.lo, "hi": "inf" if p.unbounded else p.hi,
                 "scale": p.scale, "power": p.power, "decay": p.decay}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, data: dict | None) -> "Measure":
        if not data:
            return cls()
        atoms = [Atom(float(a["lambda"]), float(a["weight"])) for a in data.get("atoms", [])]
        pieces = []
        for p in data.get("pieces", []):
            hi = p.get("hi", "inf")
            hi = math.inf if hi in ("inf", "Infinity", None) else float(hi)
            pieces.append(DensityPiece(float(p.get("lo", 0.0)), hi, float(p["scale"]),
                                       float(p["power"]), float(p.get("decay", 0.0))))
        return cls(tuple(atoms), tuple(pieces))


# ---------------------------------------------------------------- kernels ---

class _Kernel:
    """Factor ``g(lam)`` multiplying the density, possibly vector-valued."""

    breakpoints: tuple[float, ...] = ()

    def values(self, lam: np.ndarray) -> np.ndarray:  # (n,) -> (n, k)
        raise NotImplementedError

    def log_envelope(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def at_zero(self) -> np.ndarray:
        raise NotImplementedError

    def asymptotic(self):
        """``(kappa, power)`` with ``g(lam) ~ kappa * lam**power`` as lam -> inf, or None."""
        return None


class _Laplace(_Kernel):
    def __init__(self, L):
        self.L = np.atleast_1d(np.asarray(L, dtype=float))
        self.Lmin = float(self.L.min())

    def values(self, lam):
        return np.exp(-np.outer(lam, self.L))

    def log_envelope(self, x):
        # components with the smallest and the largest L bracket all the others
        Lmax = float(self.L.max())
        with np.errstate(over="ignore"):
            return -np.outer([self.Lmin, Lmax], np.exp(x))

    def at_zero(self):
        return np.ones(self.L.size)

    def asymptotic(self):
        if self.Lmin == 0:
            return np.where(self.L == 0, 1.0, 0.0), 0.0
        return None


class _Cauchy(_Kernel):
    """``1/(lam+z)`` or, with ``inverse=True``, ``z/(lam+z)``."""

    def __init__(self, z, inverse=False):
        self.z = np.atleast_1d(np.asarray(z, dtype=complex))
        self.inverse = inverse
        mod = np.abs(self.z)
        self.zeta = float(mod.min())
        self.zmax = float(mod.max())
        bps = [math.log(abs(v)) for v in self.z if v != 0]
        bps += [math.log(-v.real) for v in self.z if v.real < 0]
        self.breakpoints = tuple(bps)

    def values(self, lam):
        out = 1.0 / (lam[:, None] + self.z[None, :])
        return out * self.z[None, :] if self.inverse else out

    def log_envelope(self, x):
        rows = [-np.maximum(x, math.log(r)) for r in (self.zeta, self.zmax)]
        if self.inverse:
            rows = [row + math.log(r) for row, r in zip(rows, (self.zeta, self.zmax))]
        return np.array(rows)

    def at_zero(self):
        return np.ones(self.z.size, dtype=complex) if self.inverse else 1.0 / self.z

    def asymptotic(self):
        return (self.z if self.inverse else np.ones(self.z.size, dtype=complex)), -1.0


class _Unit(_Kernel):
    def values(self, lam):
        return np.ones((lam.size, 1))

    def log_envelope(self, x):
        return np.zeros((1, x.size))

    def at_zero(self):
        return np.ones(1)

    def asymptotic(self):
        return np.ones(1), 0.0


def _piece_integral(lo, hi, scale, power, decay, kernel: _Kernel,
                    rel_tol=REL_TOL, abs_tol=ABS_TOL) -> np.ndarray:
    """``int_lo^hi scale * lam**power * exp(-decay*lam) * g(lam) dlam`` per component."""
    p1 = power + 1.0
    x_lo = math.log(lo) if lo > 0 else -math.inf
    x_hi = math.log(hi) if math.isfinite(hi) else math.inf
    log_c = math.log(scale)

    grid = _X_GRID[(_X_GRID >= x_lo) & (_X_GRID <= x_hi)]
    if grid.size:
        # one envelope row per extreme component; keep the union of their ranges
        with np.errstate(over="ignore"):
            env = log_c + p1 * grid - decay * np.exp(grid) + kernel.log_envelope(grid)
        peaks = env.max(axis=1, keepdims=True)
        keep = np.nonzero(np.any(env >= peaks + _LOG_FLOOR, axis=0))[0]
        a = max(x_lo, grid[keep[0]] - 0.25)
        b = min(x_hi, grid[keep[-1]] + 0.25)
    else:
        a, b = x_lo, x_hi
    if not math.isfinite(a):
        a = _X_BOTTOM
    if not math.isfinite(b):
        b = _X_CAP

    def f(x):
        lam = np.exp(x)
        with np.errstate(over="ignore", under="ignore"):
            w = np.exp(np.minimum(log_c + p1 * x - decay * lam, 700.0))
        return w[:, None] * kernel.values(lam)

    bps = list(np.arange(math.ceil(a), b, 2.0)) + list(kernel.breakpoints)
    res = integrate(f, a, b, breakpoints=bps, rel_tol=rel_tol, abs_tol=abs_tol)
    total = np.asarray(res.value, dtype=complex)

    if lo == 0:
        # closed-form contribution of (0, exp(a)) with g frozen at g(0)
        total = total + scale * kernel.at_zero() * math.exp(p1 * a) / p1
    if math.isinf(hi) and b >= _X_CAP - 1e-9:
        asym = kernel.asymptotic()
        expo = p1 + (asym[1] if asym else 0.0)
        tail_env = log_c + p1 * b - decay * math.exp(min(b, 700.0)) + kernel.log_envelope(np.array([b]))[:, 0]
        if grid.size and np.any(tail_env > peaks[:, 0] + _LOG_FLOOR):
            if decay > 0 or asym is None or expo >= 0:
                raise DivergentMeasure("integrand does not decay on the unbounded piece")
            total = total + scale * asym[0] * math.exp(expo * b) / (-expo)
    if np.all(np.isreal(total)):
        return total.real
    return total


def _integrate_measure(m: Measure, atom_values, kernel: _Kernel, power_shift: float = 0.0):
    """Sum of atom contributions and piece integrals for one kernel."""
    total = np.zeros(np.size(kernel.at_zero()), dtype=complex)
    for a in m.atoms:
        total += a.weight * atom_values(a.position)
    for p in m.pieces:
        total += _piece_integral(p.lo, p.hi, p.scale, p.power + power_shift, p.decay, kernel)
    return total


# ------------------------------------------------------------- operations ---

def validate_measure(m: Measure) -> float:
    """Return ``int dsigma(lam) / (lam + 1)``, checking that it is finite."""
    for a in m.atoms:
        if not a.weight > 0:
            raise NonPositiveWeight(f"atom weight {a.weight} is not positive")
    for p in m.pieces:
        DensityPiece.__post_init__(p)
    val = _integrate_measure(m, lambda lam: np.array([1.0 / (lam + 1.0)]), _Cauchy([1.0]))
    out = float(val[0].real)
    if not math.isfinite(out):
        raise DivergentMeasure("int dsigma/(lam+1) is not finite")
    return out


def reciprocal_moment(m: Measure) -> float:
    """``int dsigma(lam) / lam``; ``inf`` when a piece is not integrable against 1/lam."""
    total = sum(a.weight / a.position for a in m.atoms)
    for p in m.pieces:
        if p.lo == 0 and p.power <= 0:
            return math.inf
        total += float(_piece_integral(p.lo, p.hi, p.scale, p.power - 1.0, p.decay, _Unit())[0])
    return total


def _laplace_closed(p: DensityPiece, L: np.ndarray) -> np.ndarray:
    """``int_lo^hi c lam**p exp(-(q+L) lam) dlam`` through incomplete gamma functions (p > -1).

    The difference of regularised incomplete gammas is taken on the side of
    the distribution where both terms are small, which avoids cancellation.
    """
    a = p.power + 1.0
    k = p.decay + L
    lo, hi = k * p.lo, k * p.hi
    upper = lo >= a
    with np.errstate(invalid="ignore"):
        frac = np.where(upper, gammaincc(a, lo) - gammaincc(a, hi), gammainc(a, hi) - gammainc(a, lo))
    with np.errstate(over="ignore"):
        return frac * np.exp(math.log(p.scale) + gammaln(a) - a * np.log(k))


def phi_from_log(m: Measure, L) -> np.ndarray:
    """Kernel value ``phi(t)`` parametrised by ``L = log(1/t) > 0``.

    Working with ``L`` keeps full relative accuracy when ``t`` is within
    rounding distance of 1.
    """
    L = np.asarray(L, dtype=float)
    shape = L.shape
    flat = L.ravel()
    if flat.size == 0:
        return np.zeros(shape)
    if np.any(~(flat > 0)):
        raise DomainError("phi needs log(1/t) > 0")
    total = np.zeros(flat.size)
    for a in m.atoms:
        total += a.weight * np.exp(-a.position * flat)
    slow = [p for p in m.pieces if not p.power > -1]
    for p in m.pieces:
        if p.power > -1:
            total += _laplace_closed(p, flat)
    if slow:
        kern = _Laplace(flat)
        for p in slow:
            total += np.real(_piece_integral(p.lo, p.hi, p.scale, p.power, p.decay, kern))
    return total.reshape(shape)


def phi_sigma(m: Measure, t):
    """``phi(t) = int t**lam dsigma(lam)`` for ``0 < t < 1`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~((t_arr > 0) & (t_arr < 1))):
        raise DomainError("phi_sigma is defined only on the open interval (0, 1)")
    out = phi_from_log(m, -np.log(t_arr))
    return float(out) if out.ndim == 0 else out


def phi_l1_norm(m: Measure) -> float:
    """``int_0^1 phi(t) dt``, which equals ``int dsigma/(lam+1)``."""
    return validate_measure(m)


def t_range_cutoff(m: Measure) -> float:
    """Upper limit ``S`` for integrals over ``t = 1 - exp(-s)``, ``0 < s < S``.

    Chosen so the discarded piece near ``t = 1`` is below ``exp(-46)`` even when
    ``phi`` blows up like ``(1-t)**-beta``.  Capped at 700, where ``exp(-s)``
    is still a normal double.
    """
    beta = m.endpoint_exponent()
    return min(46.0 / (1.0 - beta), 700.0)


def t_and_log_from_s(s):
    """``t = 1 - exp(-s)`` and ``L = log(1/t)`` computed without cancellation."""
    s = np.asarray(s, dtype=float)
    t = -np.expm1(-s)
    with np.errstate(divide="ignore"):
        L = -np.log1p(-np.exp(-s))
    return t, L


def phi_l1_norm_direct(m: Measure) -> float:
    """Same integral as :func:`phi_l1_norm`, by quadrature of ``phi`` over (0, 1)."""
    if m.is_zero:
        return 0.0
    s_max = t_range_cutoff(m)

    def f(s):
        _, L = t_and_log_from_s(s)
        return np.exp(-s) * phi_from_log(m, L)

    bps = [1e-8, 1e-5, 1e-3, 0.03, 0.3, 1, 2, 4, 8, 16, 32, 64, 128]
    return float(integrate(f, 0.0, s_max, breakpoints=bps, rel_tol=1e-13, abs_tol=1e-15).value)


def kernel_gram(m: Measure, points: Sequence[float]) -> np.ndarray:
    """Matrix ``G[i, j] = phi(t_i * t_j)``."""
    t = np.asarray(points, dtype=float)
    if t.ndim != 1 or np.any(~((t > 0) & (t < 1))):
        raise DomainError("Gram points must lie in (0, 1)")
    if m.is_zero:
        raise DegenerateError("the kernel of the zero measure vanishes identically")
    L = -np.log(t)
    G = phi_from_log(m, L[:, None] + L[None, :])
    return 0.5 * (G + G.T)


def cauchy_transform(m: Measure, z, inverse: bool = False, chunk: int = 32) -> np.ndarray:
    """``int dsigma/(lam+z)`` or, with ``inverse``, ``int z dsigma/(lam+z)``.

    Points are processed in chunks of similar modulus so that each adaptive
    partition only has to resolve a narrow range of scales.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.zeros(z.size, dtype=complex)
    if m.is_zero or z.size == 0:
        return out
    order = np.argsort(np.abs(z), kind="stable")
    for start in range(0, z.size, chunk):
        idx = order[start:start + chunk]
        zc = z[idx]

        def atom_values(lam, zc=zc):
            v = 1.0 / (lam + zc)
            return v * zc if inverse else v

        out[idx] = _integrate_measure(m, atom_values, _Cauchy(zc, inverse=inverse))
    return out


def total_mass(m: Measure) -> float:
    total = sum(a.weight for a in m.atoms)
    for p in m.pieces:
        if p.unbounded and p.decay == 0:
            return math.inf
        total += float(_piece_integral(p.lo, p.hi, p.scale, p.power, p.decay, _Unit())[0])
    return total


def measures_from(specs: Iterable[dict]) -> list[Measure]:
    return [Measure.from_dict(s) for s in specs]
