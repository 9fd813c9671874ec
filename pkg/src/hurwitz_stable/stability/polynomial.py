"""Polynomial stability: Routh-Hurwitz test and Aberth-Ehrlich root finding.

Coefficient lists are highest degree first, as in :func:`numpy.polyval`.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import NonConvergence, ZeroLeadingCoefficient

STABLE = "stable"
NOT_STABLE = "not_stable"
DEGENERATE = "degenerate"

_EPS = np.finfo(float).eps


def _strip(coeffs: Sequence) -> np.ndarray:
    c = np.asarray(coeffs)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficients must be a non-empty 1-D sequence")
    if c[0] == 0:
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    return c


def balance_scale(c: np.ndarray) -> float:
    """``rho`` making ``|c_0| rho**n`` and ``|c_n|`` equal (geometric mean root modulus).

    Clamped so that ``rho**n`` stays within 1e-150..1e150; subnormal scales
    overflow complex division.
    """
    nz = np.nonzero(c)[0]
    last = nz[-1]
    if last == 0:
        return 1.0
    rho = abs(c[last] / c[0]) ** (1.0 / last)
    bound = 1e150 ** (1.0 / (c.size - 1))
    return float(min(max(rho, 1.0 / bound), bound))


def routh_hurwitz(coeffs: Sequence[float], tol: float = 1e-12) -> str:
    """Classical Routh-Hurwitz test for a real polynomial.

    The first column of the Routh array holds ratios of consecutive Hurwitz
    minors, so all of them are positive exactly when every leading principal
    minor is.  The variable is rescaled first so that the coefficients are
    balanced, and each Routh row is normalised, which makes ``tol`` a relative
    threshold for calling a minor zero.
    """
    c = np.asarray(_strip(coeffs), dtype=float)
    c = c / c[0]
    n = c.size - 1
    if n == 0:
        return STABLE
    if np.any(c <= 0):
        # a real Hurwitz polynomial has all coefficients of one sign
        return NOT_STABLE
    rho = balance_scale(c)
    c = c * rho ** np.arange(n, -1, -1)      # coefficients of p(rho w)
    c = c / np.max(np.abs(c))
    prev = c[0::2].copy()
    cur = c[1::2].copy()
    for _ in range(n):
        if cur.size == 0:
            break
        cur = cur / np.max(np.abs(np.concatenate([prev, cur])))
        lead = cur[0]
        if abs(lead) <= tol:
            return DEGENERATE
        if lead < 0:
            return NOT_STABLE
        nxt = np.zeros(max(prev.size - 1, 0))
        for j in range(nxt.size):
            right = cur[j + 1] if j + 1 < cur.size else 0.0
            nxt[j] = prev[j + 1] - prev[0] / lead * right
        prev, cur = cur, nxt
        if not np.any(cur) and prev.size > 1:
            return DEGENERATE
    return STABLE


def _newton_polygon_starts(c: np.ndarray) -> np.ndarray:
    """Initial points on circles read off the upper convex hull of ``(k, log|a_k|)``.

    ``c`` is highest-first; the hull is built over ascending powers.
    """
    a = np.abs(c[::-1])
    n = a.size - 1
    with np.errstate(divide="ignore"):
        la = np.log(a)
    pts = [k for k in range(n + 1) if np.isfinite(la[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j if it lies on or below the segment i -> k
            if (la[j] - la[i]) * (k - i) <= (la[k] - la[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    starts = []
    for seg, (i, j) in enumerate(zip(hull, hull[1:])):
        m = j - i
        r = math.exp((la[i] - la[j]) / m)
        ang = 2 * np.pi * np.arange(m) / m + 0.4 + 0.7 * seg
        starts.append(r * np.exp(1j * ang))
    return np.concatenate(starts) if starts else np.empty(0, dtype=complex)


def _ratio(c: np.ndarray, w: np.ndarray):
    """``p(w)/p'(w)`` and a roundoff-level bound on ``|p(w)|`` relative to ``|p'|``.

    Inside the unit disk Horner runs on ``p``; outside it runs on the reversed
    polynomial in ``u = 1/w``, which keeps the evaluation well scaled.
    """
    n = c.size - 1
    out = np.empty(w.size, dtype=complex)
    small = np.empty(w.size, dtype=bool)
    inside = np.abs(w) <= 1.0
    for mask, rev in ((inside, False), (~inside, True)):
        if not np.any(mask):
            continue
        x = w[mask] if not rev else 1.0 / w[mask]
        coef = c if not rev else c[::-1]
        p = np.zeros_like(x)
        dp = np.zeros_like(x)
        mag = np.zeros(x.size)
        ax = np.abs(x)
        for ck in coef:
            dp = dp * x + p
            p = p * x + ck
            mag = mag * ax + abs(ck)
        with np.errstate(divide="ignore", invalid="ignore"):
            if not rev:
                out[mask] = p / dp
            else:
                out[mask] = w[mask] / (n - x * dp / p)
        small[mask] = np.abs(p) <= 4.0 * (n + 1) * _EPS * mag
    return out, small


def poly_roots(coeffs: Sequence, *, max_sweeps: int = 500, step_tol: float = 1e-13):
    """All roots of a polynomial as ``(root, residual)`` pairs, sorted by modulus.

    Aberth-Ehrlich simultaneous iteration from Newton-polygon starting points.
    The residual is ``|p(z)/p'(z)|``, i.e. the size of the Newton correction.
    """
    c = _strip(coeffs).astype(complex)
    n_zero = 0
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
        n_zero += 1
    n = c.size - 1
    roots_out = [(0j, 0.0)] * n_zero
    if n == 0:
        return roots_out
    rho = balance_scale(c)
    cs = c * rho ** np.arange(n, -1, -1)
    cs = cs / np.max(np.abs(cs))
    if n == 1:
        z = -cs[1] / cs[0]
        return sorted(roots_out + [(complex(z * rho), 0.0)], key=lambda t: abs(t[0]))

    w = _newton_polygon_starts(cs)
    done = np.zeros(n, dtype=bool)
    for sweep in range(max_sweeps):
        act = ~done
        ratio, small = _ratio(cs, w[act])
        diff = w[act][:, None] - w[None, :]
        idx = np.nonzero(act)[0]
        diff[np.arange(idx.size), idx] = np.inf
        sigma = np.sum(1.0 / diff, axis=1)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            step = ratio / (1.0 - ratio * sigma)
        step = np.where(np.isfinite(step), step, 0.0)
        w[act] = w[act] - step
        conv = (np.abs(step) < step_tol * np.maximum(1.0, np.abs(w[act]))) | small
        done[idx[conv]] = True
        if np.all(done):
            break
    else:
        partial = [(complex(z * rho), float("nan")) for z in w]
        raise NonConvergence(f"Aberth iteration did not converge in {max_sweeps} sweeps", partial)

    ratio, _ = _ratio(cs, w)
    res = np.abs(ratio) * rho
    roots_out += [(complex(z * rho), float(r if np.isfinite(r) else 0.0)) for z, r in zip(w, res)]
    return sorted(roots_out, key=lambda t: abs(t[0]))


def max_real_part(coeffs: Sequence) -> float:
    return max(r.real for r, _ in poly_roots(coeffs))


def multiplier_polynomial(p_ascending: Sequence[float], multipliers: Sequence[float]) -> np.ndarray:
    """``sum p_k mu_k z**k`` returned highest-first, from ascending ``p_k``."""
    p = np.asarray(p_ascending, dtype=float)
    mu = np.asarray(multipliers, dtype=float)[: p.size]
    return (p * mu)[::-1]
