"""Argument-principle zero counting and zero location."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from ..construct import TruncatedEntireFunction
from ..errors import ContourTooClose, NonConvergence, TruncationError
from ..quadrature import integrate

INDENT = 1e-3


@dataclass
class WindingResult:
    count: int
    raw: complex
    error: float
    min_abs: float
    min_point: complex


def _pieces(R: float, indent: bool):
    """Counter-clockwise boundary of ``{Re z >= 0, |z| <= R}`` as ``(z(u), z'(u), u0, u1)`` pieces.

    Splitting at the corners keeps every piece smooth.  With ``indent`` the
    axis passes the origin on a small half-circle into the right half-plane,
    leaving a zero at 0 outside the region.
    """
    arc = (lambda u: R * np.exp(1j * u), lambda u: 1j * R * np.exp(1j * u), -np.pi / 2, np.pi / 2)
    if not indent:
        return [arc, (lambda u: 1j * u, lambda u: np.full(u.shape, 1j), R, -R)]
    return [
        arc,
        (lambda u: 1j * u, lambda u: np.full(u.shape, 1j), R, INDENT),
        (lambda u: INDENT * np.exp(1j * u), lambda u: 1j * INDENT * np.exp(1j * u), np.pi / 2, -np.pi / 2),
        (lambda u: 1j * u, lambda u: np.full(u.shape, 1j), -INDENT, -R),
    ]


def _contour_samples(R: float, n: int = 2048, indent: bool = False) -> np.ndarray:
    th = np.linspace(-np.pi / 2, np.pi / 2, n)
    y = np.linspace(-R, R, n)
    if indent:
        y = y[np.abs(y) > INDENT]
    return np.concatenate([R * np.exp(1j * th), 1j * y])


def _axis_minimum(T: Callable, R: float, indent: bool):
    """Smallest ``|T|`` on the contour, refined around the sampled minima.

    The refinement minimises ``|T|**2``, which is smooth at a zero where
    ``|T|`` has a kink.
    """
    pts = _contour_samples(R, indent=indent)
    vals = np.abs(T(pts))
    order = np.argsort(vals)[:8]
    best_val, best_pt = float(vals[order[0]]), complex(pts[order[0]])
    n_arc = 2048
    for i in order:
        z0 = pts[i]
        if i < n_arc:
            th0 = np.angle(z0)
            h = np.pi / n_arc
            f = lambda th: abs(T(R * np.exp(1j * th))) ** 2
            res = minimize_scalar(f, bounds=(max(th0 - h, -np.pi / 2), min(th0 + h, np.pi / 2)),
                                  method="bounded", options={"xatol": 1e-15})
            z = R * np.exp(1j * res.x)
        else:
            y0 = z0.imag
            h = 2 * R / n_arc
            f = lambda y: abs(T(1j * y)) ** 2
            lo, hi = max(y0 - h, -R), min(y0 + h, R)
            if indent:
                # stay on the sampled side of the indentation
                lo, hi = (max(lo, INDENT), hi) if y0 > 0 else (lo, min(hi, -INDENT))
            res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-15})
            z = 1j * res.x
        val = abs(T(z))
        if val < best_val:
            best_val, best_pt = float(val), complex(z)
    return best_val, best_pt, float(np.median(vals))


def winding_number(f: Callable, df: Callable, pieces, rel_tol: float = 1e-10) -> tuple[complex, float]:
    """``(1/2 pi i) sum over pieces of int f'/f dz`` with its quadrature error."""
    total = 0j
    err = 0.0
    for z, dz, u0, u1 in pieces:
        def g(u, z=z, dz=dz):
            zz = z(u)
            return df(zz) / f(zz) * dz(u)

        speed = float(np.abs(dz(np.array([u0])))[0])
        n_seed = int(np.clip(abs(u1 - u0) * speed / 0.5, 8, 4000))
        bps = np.linspace(min(u0, u1), max(u0, u1), n_seed + 1)[1:-1]
        res = integrate(g, u0, u1, breakpoints=bps, rel_tol=rel_tol, abs_tol=1e-10, max_level=40)
        total += complex(res.value)
        err += float(np.abs(res.error))
    return total / (2j * np.pi), err / (2 * np.pi)


def count_zeros_right_half(T: TruncatedEntireFunction, R: float, *, check_tail: bool = True) -> int:
    """Number of zeros of ``T`` in ``{Re z > 0, |z| < R}`` by the argument principle.

    Raises :class:`TruncationError` when the certified tail is not small
    compared with ``|T|`` on the contour, and :class:`ContourTooClose` when
    ``|T|`` nearly vanishes on the contour (a zero on or next to the boundary).
    """
    return count_zeros_detail(T, R, check_tail=check_tail).count


def count_zeros_detail(T: TruncatedEntireFunction, R: float, *, check_tail: bool = True) -> WindingResult:
    R = float(R)
    indent = bool(T.coeffs[0] == 0)
    budget_R = T.tail_bound(R) + T.roundoff(R)
    min_abs, min_pt, median_abs = _axis_minimum(T, R, indent)
    if check_tail and budget_R > 1e-3 * median_abs:
        raise TruncationError(
            f"tail bound {budget_R:.3e} at R={R} is not small against typical |T| = {median_abs:.3e}")
    local_budget = T.tail_bound(abs(min_pt)) + T.roundoff(abs(min_pt))
    if min_abs < 10.0 * local_budget or min_abs == 0:
        raise ContourTooClose(
            f"|T| = {min_abs:.3e} at {min_pt:.6g} is within the error budget {local_budget:.3e}",
            point=min_pt, value=min_abs)
    if min_abs < 2.0 * budget_R:
        raise TruncationError(f"min |T| = {min_abs:.3e} on the contour is below twice the tail bound")
    raw, err = winding_number(T, T.derivative, _pieces(R, indent))
    n = int(round(raw.real))
    est = abs(raw.real - n) + abs(raw.imag) + err
    if est >= 0.25:
        raise NonConvergence(f"winding number {raw} not resolved (error {est:.3f})")
    return WindingResult(n, raw, est, min_abs, min_pt)


# ----------------------------------------------------------- zero location ---

def _edge_phase(f: Callable, a: complex, b: complex, h0: float, cache: dict, max_pass: int = 40):
    """Total change of ``arg f`` along the segment ``a -> b``.

    The segment is sampled with spacing at most ``h0`` and refined wherever
    consecutive phases differ by more than pi/4.  Returns ``(dphase, min|f|)``.
    """
    n = max(2, int(math.ceil(abs(b - a) / h0)) + 1)
    s = np.linspace(0.0, 1.0, n)
    for _ in range(max_pass):
        z = a + (b - a) * s
        key = [complex(v) for v in z]
        missing = [v for v in key if v not in cache]
        if missing:
            vals = np.atleast_1d(f(np.array(missing)))
            cache.update(zip(missing, vals))
        fv = np.array([cache[v] for v in key])
        if np.any(fv == 0):
            raise ContourTooClose("function vanishes on a box edge", point=complex(z[fv == 0][0]), value=0.0)
        d = np.angle(fv[1:] / fv[:-1])
        bad = np.abs(d) > np.pi / 4
        if not np.any(bad):
            return float(np.sum(d)), float(np.min(np.abs(fv)))
        if np.min(np.diff(s)[bad]) * abs(b - a) < 1e-12:
            raise ContourTooClose("phase not resolved on a box edge", point=complex(z[1:][bad][0]))
        mids = 0.5 * (s[:-1] + s[1:])[bad]
        s = np.sort(np.concatenate([s, mids]))
    raise ContourTooClose("phase refinement limit reached")


def box_count(f: Callable, x0: float, x1: float, y0: float, y1: float, h0: float, cache: dict) -> int:
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        d, _ = _edge_phase(f, a, b, h0, cache)
        total += d
    n = total / (2 * np.pi)
    k = int(round(n))
    if abs(n - k) > 0.1:
        raise ContourTooClose(f"box winding {n:.3f} is not close to an integer")
    return k


def newton(f: Callable, df: Callable, z0: complex, tol: float = 1e-12, max_iter: int = 60):
    z = complex(z0)
    for _ in range(max_iter):
        step = complex(f(z) / df(z))
        z -= step
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, abs(step)
    raise NonConvergence("Newton iteration did not converge", partial=z)


def find_zeros(f: Callable, df: Callable, box: tuple[float, float, float, float], *,
               h0: float = 0.25, newton_size: float = 2.0, min_size: float = 1e-7):
    """Locate all zeros of ``f`` inside ``box = (x0, x1, y0, y1)``.

    Recursive quadrisection with winding-number counts on the box edges;
    boxes holding exactly one zero are finished by Newton's method.  Returns
    ``[(zero, residual), ...]``; a tight cluster that cannot be separated is
    returned as its box centre repeated by multiplicity with residual ``nan``.
    """
    cache: dict = {}
    out = []
    stack = [(box, None)]
    while stack:
        (x0, x1, y0, y1), known = stack.pop()
        n = box_count(f, x0, x1, y0, y1, h0, cache) if known is None else known
        if n == 0:
            continue
        size = max(x1 - x0, y1 - y0)
        if n == 1 and size <= newton_size:
            try:
                z, res = newton(f, df, complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)))
                pad = 1e-9 * max(1.0, abs(z))
                if x0 - pad <= z.real <= x1 + pad and y0 - pad <= z.imag <= y1 + pad:
                    out.append((z, res))
                    continue
            except NonConvergence:
                pass
        if size < min_size:
            c = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            out.extend([(c, float("nan"))] * n)
            continue
        # split slightly off centre so that symmetric zeros avoid the new edges
        xm = x0 + 0.5123 * (x1 - x0)
        ym = y0 + 0.4877 * (y1 - y0)
        hh = min(h0, 0.25 * size)
        children = [(x0, xm, y0, ym), (xm, x1, y0, ym), (xm, x1, ym, y1), (x0, xm, ym, y1)]
        counts = [box_count(f, *c, hh, cache) for c in children]
        if sum(counts) != n:
            raise ContourTooClose(f"sub-box counts {counts} do not add up to {n}")
        stack.extend((c, k) for c, k in zip(children, counts) if k)
    return sorted(out, key=lambda t: abs(t[0]))
