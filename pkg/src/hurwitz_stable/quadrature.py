"""Adaptive Gauss-Kronrod (7/15) quadrature for vectorized, vector-valued integrands.

The integrand ``f`` receives a 1-D array of abscissae and returns either an
array of the same length or an array of shape ``(len(x), k)``; in the second
case the ``k`` components share one adaptive partition and each must meet the
tolerance.  Complex values are supported.

Refinement is done in bulk: every pass evaluates all active subintervals in
one call, retires those whose local error is already small, and bisects the
rest.  The loop stops when the global error estimate meets the tolerance or
after ``max_level`` bisection passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureFailure

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point node set on [-1, 1]; the Gauss weights vanish on Kronrod-only nodes.
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_wg_full = np.zeros(8)
_wg_full[1::2] = _WG
GAUSS_WEIGHTS = np.concatenate([_wg_full[:-1], _wg_full[::-1]])

_EPS = np.finfo(float).eps


@dataclass
class QuadResult:
    value: np.ndarray
    error: np.ndarray
    converged: bool
    intervals: np.ndarray
    levels: int
    absint: np.ndarray | float = 0.0

    def __iter__(self):
        # allows ``value, error = integrate(...)``
        yield self.value
        yield self.error


def _apply_rule(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()))
    fx = fx.reshape(len(lo), NODES.size, -1)
    wk = half[:, None] * KRONROD_WEIGHTS[None, :]
    wg = half[:, None] * GAUSS_WEIGHTS[None, :]
    k = np.einsum("ij,ijc->ic", wk, fx)
    g = np.einsum("ij,ijc->ic", wg, fx)
    absint = np.einsum("ij,ijc->ic", np.abs(wk), np.abs(fx))
    return k, np.abs(k - g), absint


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    breakpoints: Sequence[float] | None = None,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    max_level: int = 60,
    max_intervals: int = 50_000,
    strict: bool = False,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    ``breakpoints`` seeds the initial partition (points outside ``(a, b)`` are
    ignored).  With ``strict=True`` a :class:`QuadratureFailure` is raised when
    the tolerance is not met; otherwise ``converged`` reports it.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integrate needs finite limits; map infinite ranges first")
    if a == b:
        probe = np.asarray(f(np.array([a])))
        shape = probe.shape[1:]
        zero = np.zeros(shape, dtype=probe.dtype)
        return QuadResult(zero, np.zeros(shape), True, np.empty((0, 2)), 0, np.zeros(shape))
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    pts = [a, b]
    if breakpoints is not None:
        pts += [float(p) for p in breakpoints if a < p < b]
    pts = np.unique(np.asarray(pts, dtype=float))
    lo, hi = pts[:-1], pts[1:]
    width = b - a

    done_val = None
    done_err = None
    done_abs = None
    done_int: list[np.ndarray] = []
    out_shape = None
    converged = False
    level = 0

    while True:
        k, err, absint = _apply_rule(f, lo, hi)
        if not np.all(np.isfinite(k)):
            raise QuadratureFailure("integrand produced non-finite values")
        if done_val is None:
            done_val = np.zeros(k.shape[1], dtype=k.dtype)
            done_err = np.zeros(k.shape[1])
            done_abs = np.zeros(k.shape[1])
            probe = np.asarray(f(np.array([0.5 * (a + b)])))
            out_shape = probe.shape[1:]
        total = done_val + k.sum(axis=0)
        # cancellation floor: an integral cannot be resolved below roundoff of int |f|
        floor = 100.0 * _EPS * (done_abs + absint.sum(axis=0))
        tol = np.maximum(np.maximum(abs_tol, rel_tol * np.abs(total)), floor)
        roundoff = 50.0 * _EPS * absint
        w = (hi - lo)[:, None]
        local_ok = np.all((err <= 0.5 * tol[None, :] * w / width) | (err <= roundoff), axis=1)
        global_err = done_err + err.sum(axis=0)
        if np.all(global_err <= tol) or np.all(local_ok):
            done_val = done_val + k.sum(axis=0)
            done_err = global_err
            done_abs = done_abs + absint.sum(axis=0)
            done_int.append(np.column_stack([lo, hi]))
            converged = bool(np.all(global_err <= tol))
            break

        done_val = done_val + k[local_ok].sum(axis=0)
        done_err = done_err + err[local_ok].sum(axis=0)
        done_abs = done_abs + absint[local_ok].sum(axis=0)
        done_int.append(np.column_stack([lo[local_ok], hi[local_ok]]))
        lo, hi = lo[~local_ok], hi[~local_ok]
        n_total = sum(len(d) for d in done_int) + 2 * len(lo)
        if level >= max_level or n_total > max_intervals:
            done_val = done_val + k[~local_ok].sum(axis=0)
            done_err = done_err + err[~local_ok].sum(axis=0)
            done_abs = done_abs + absint[~local_ok].sum(axis=0)
            done_int.append(np.column_stack([lo, hi]))
            converged = bool(np.all(done_err <= tol))
            break
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        level += 1

    if strict and not converged:
        raise QuadratureFailure(
            f"adaptive quadrature stalled after {level} levels: "
            f"error {np.max(done_err):.3e} above tolerance"
        )
    intervals = np.concatenate(done_int)
    intervals = intervals[np.argsort(intervals[:, 0])]
    value = sign * done_val.reshape(out_shape)
    error = done_err.reshape(out_shape)
    absval = done_abs.reshape(out_shape)
    if value.ndim == 0:
        value, error, absval = value[()], error[()], absval[()]
    return QuadResult(value, error, converged, intervals, level, absval)


def rule_on_partition(intervals: np.ndarray):
    """Nodes and Kronrod/Gauss weights of the composite rule on ``intervals``.

    Returns ``(x, wk, wg)`` as flat arrays, so that ``wk @ f(x)`` reproduces the
    adaptive estimate and ``(wk - wg) @ f(x)`` its error indicator.
    """
    lo, hi = intervals[:, 0], intervals[:, 1]
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    wk = (half[:, None] * KRONROD_WEIGHTS[None, :]).ravel()
    wg = (half[:, None] * GAUSS_WEIGHTS[None, :]).ravel()
    return x, wk, wg
