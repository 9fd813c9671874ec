"""Laguerre-Polya class I functions ``C z**m exp(alpha z) prod(1 + delta z)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import binom, gammainc

from .errors import DomainError


@dataclass(frozen=True)
class LP1Function:
    C: float = 1.0
    m: int = 0
    alpha: float = 0.0
    deltas: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if not (math.isfinite(self.C) and self.C != 0):
            raise DomainError(f"C must be finite and non-zero, got {self.C}")
        if int(self.m) != self.m or self.m < 0:
            raise DomainError(f"m must be a non-negative integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be finite and >= 0, got {self.alpha}")
        if any(not (d >= 0 and math.isfinite(d)) for d in self.deltas):
            raise DomainError("zero parameters delta must be finite and >= 0")

    @classmethod
    def exp(cls, alpha: float = 1.0) -> "LP1Function":
        return cls(alpha=alpha)

    @property
    def zero_free_at_origin(self) -> bool:
        return self.m == 0

    def polynomial(self) -> np.ndarray:
        """Ascending coefficients of ``z**m prod(1 + delta z)``."""
        q = np.array([1.0])
        for d in self.deltas:
            q = P.polymul(q, [1.0, d])
        return np.concatenate([np.zeros(self.m), q])

    def __call__(self, z):
        return lp1_eval(self, z)

    def to_dict(self) -> dict:
        return {"C": self.C, "m": self.m, "alpha": self.alpha, "deltas": list(self.deltas)}

    @classmethod
    def from_dict(cls, data: dict | None) -> "LP1Function":
        if not data:
            return cls.exp(1.0)
        return cls(float(data.get("C", 1.0)), int(data.get("m", 0)),
                   float(data.get("alpha", 0.0)), tuple(data.get("deltas", ())))


def lp1_eval(F: LP1Function, z):
    z_arr = np.asarray(z, dtype=complex)
    out = F.C * np.exp(F.alpha * z_arr) * z_arr ** F.m
    for d in F.deltas:
        out = out * (1.0 + d * z_arr)
    return complex(out) if out.ndim == 0 else out


def exp_coeffs(alpha: float, n: int) -> np.ndarray:
    """``alpha**k / k!`` for ``k = 0..n`` by upward recursion."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * alpha / k
    return out


def lp1_taylor(F: LP1Function, N: int) -> np.ndarray:
    """Taylor coefficients ``f_0..f_N``."""
    if N < 0:
        raise DomainError("N must be >= 0")
    q = F.polynomial()
    e = exp_coeffs(F.alpha, N)
    f = np.convolve(e, q)[: N + 1]
    if f.size < N + 1:
        f = np.concatenate([f, np.zeros(N + 1 - f.size)])
    return F.C * f


def lp1_derivative_coeffs(F: LP1Function, N: int) -> np.ndarray:
    """Coefficients ``(k+1) f_{k+1}`` of ``F'`` for ``k = 0..N``."""
    f = lp1_taylor(F, N + 1)
    return f[1:] * np.arange(1, N + 2)


def lp1_derivative(F: LP1Function, z, order: int = 1):
    """``F^(order)(z)`` by the product rule on ``C exp(alpha z) Q(z)``."""
    z_arr = np.asarray(z, dtype=complex)
    q = F.polynomial()
    acc = np.zeros_like(z_arr)
    for i in range(order + 1):
        qi = P.polyder(q, i) if i else q
        if qi.size == 0 or not np.any(qi):
            continue
        acc = acc + binom(order, i) * F.alpha ** (order - i) * P.polyval(z_arr, qi)
    out = F.C * np.exp(F.alpha * z_arr) * acc
    return complex(out) if out.ndim == 0 else out


def indicator(F: LP1Function, theta) -> np.ndarray:
    """``h_F(theta) = alpha cos(theta)``."""
    return F.alpha * np.cos(theta)


def exp_tail(M, x: float):
    """``sum_{i > M} x**i / i!`` (vectorised over integer ``M``)."""
    M = np.asarray(M)
    if x == 0:
        return np.where(M < 0, 1.0, 0.0)
    with np.errstate(over="ignore"):
        ex = math.exp(x) if x < 709 else math.inf
    safe = np.maximum(M + 1, 1)
    return np.where(M < 0, ex, ex * gammainc(safe, x))


def tail_majorant(F: LP1Function, N: int, R: float, linear: float = 0.0, offset: float = 0.0) -> float:
    """Bound on ``sum_{k>N} mu_k |f_k| R**k`` when ``mu_k <= linear*k + offset``.

    Writing ``F = C exp(alpha z) sum_j q_j z**j`` with ``q_j >= 0`` gives
    ``sum_{k>N} |f_k| R^k = |C| sum_j q_j R^j T_{N-j}(alpha R)`` and
    ``sum_{k>N} k |f_k| R^k = |C| sum_j q_j R^j (x T_{N-j-1}(x) + j T_{N-j}(x))``
    with ``x = alpha R`` and ``T_M(x) = sum_{i>M} x^i/i!``.
    """
    q = F.polynomial()
    j = np.arange(q.size)
    x = F.alpha * R
    tN = exp_tail(N - j, x)
    plain = float(np.sum(q * R ** j * tN))
    total = offset * plain
    if linear:
        ramp = float(np.sum(q * R ** j * (x * exp_tail(N - j - 1, x) + j * tN)))
        total += linear * ramp
    return abs(F.C) * total


def coefficient_majorant(F: LP1Function, R: float, N: int) -> float:
    """``sum_{k<=N} |f_k| R**k`` (all ``f_k`` share the sign of ``C``)."""
    return float(np.sum(np.abs(lp1_taylor(F, N)) * R ** np.arange(N + 1)))


def lp1_from_roots(roots: Sequence[float], C: float = 1.0, alpha: float = 0.0) -> LP1Function:
    """LP-I function with zeros at the given non-positive reals (``z + r`` -> ``r(1 + z/r)``)."""
    roots = [float(r) for r in roots]
    if any(r > 0 for r in roots):
        raise DomainError("LP-I zeros must be non-positive")
    m = sum(1 for r in roots if r == 0)
    C_eff = C * math.prod(-r for r in roots if r != 0)
    return LP1Function(C_eff, m, alpha, tuple(-1.0 / r for r in roots if r != 0))
