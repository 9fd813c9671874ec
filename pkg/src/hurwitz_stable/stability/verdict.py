"""Stability verdicts: indicator estimates, certified roots and root densities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ..construct import TruncatedEntireFunction
from ..errors import (
    ContourTooClose,
    EvaluationUnderflow,
    NonConvergence,
    TruncationError,
)
from .contour import count_zeros_detail
from .polynomial import poly_roots

STABLE = "stable"
BOUNDARY = "boundary"
UNSTABLE = "unstable"
INCONCLUSIVE = "inconclusive"
VERDICTS = (STABLE, BOUNDARY, UNSTABLE, INCONCLUSIVE)


class IndicatorEstimate(NamedTuple):
    """Slope estimate of ``r**-1 log|Phi(r e^{i theta})|``; a numerical stand-in for the limsup."""

    h: float
    spread: float

    def __float__(self):
        return float(self.h)


def indicator_estimate(evaluator: Callable, theta: float, radii: Sequence[float],
                       fit_fraction: float = 0.5) -> IndicatorEstimate:
    """Least-squares slope of ``log|Phi(r e^{i theta})|`` against ``r``.

    Only the largest ``fit_fraction`` of the radii enter the fit (at least 4),
    and the intercept absorbs the constant and slowly varying factors.  The
    spread is the standard error of the slope.
    """
    r = np.sort(np.asarray(radii, dtype=float))
    if r.size < 4:
        raise ValueError("indicator_estimate needs at least 4 radii")
    vals = np.abs(np.asarray(evaluator(r * np.exp(1j * theta)), dtype=complex))
    if np.any(vals < 1e-280):
        raise EvaluationUnderflow(f"|Phi| underflows at theta={theta}; use smaller radii")
    k = max(4, int(round(fit_fraction * r.size)))
    x, y = r[-k:], np.log(vals[-k:])
    # centred normal equations: a constant factor of Phi only moves the mean
    dx, dy = x - x.mean(), y - y.mean()
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx
    resid = dy - slope * dx
    dof = max(k - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof / sxx)
    return IndicatorEstimate(slope, se)


def certified_radius(T: TruncatedEntireFunction, R_max: float, n_radii: int = 128,
                     n_theta: int = 512, margin: float = 2.0) -> float:
    """Largest sampled ``rho <= R_max`` with ``min_{|z|=rho} |T| > margin * error(rho)``.

    ``error`` is the certified tail plus the Horner rounding bound.  On such a
    circle Rouche's theorem gives ``T`` and the untruncated function equally
    many zeros inside, so roots of ``T`` there are genuine approximations.
    """
    th = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    best = 0.0
    for rho in np.linspace(R_max / n_radii, R_max, n_radii):
        m = float(np.min(np.abs(T(rho * np.exp(1j * th)))))
        if m > margin * (T.tail_bound(rho) + T.roundoff(rho)):
            best = float(rho)
    return best


def rotated_angle(z) -> np.ndarray:
    """Angle measured from the positive imaginary axis towards the left half-plane.

    The open left half-plane maps to ``(0, pi)``; directions just left of
    ``+i`` have small angles and those just left of ``-i`` are close to ``pi``.
    """
    return np.angle(-1j * np.asarray(z, dtype=complex))


def root_density(roots, r: float, alpha: float, beta: float) -> float:
    """``n(r; alpha, beta) / r``: roots with ``|z| < r`` and ``alpha < angle <= beta``.

    Angles are :func:`rotated_angle` values, so the sectors ``(0, eps)``,
    ``(eps, pi - eps)`` and ``(pi - eps, pi)`` split the left half-plane into
    the two strips along the imaginary axis and the interior.  A root on a
    sector edge is counted in the sector below it.
    """
    z = np.asarray([complex(x[0]) if isinstance(x, tuple) else complex(x) for x in roots])
    if z.size == 0:
        return 0.0
    th = rotated_angle(z)
    inside = (np.abs(z) < r) & (th > alpha) & (th <= beta)
    return float(np.count_nonzero(inside)) / r


@dataclass
class VerdictParams:
    R: float = 10.0
    radii: Sequence[float] | None = None
    evaluator: Callable | None = None
    indicator_tol: float = 0.05
    axis_tol: float = 1e-9
    epsilon: float = 0.3
    density_radii: Sequence[float] | None = None
    root_finder: Callable | None = None


@dataclass
class StabilityReport:
    zero_count_rhp: int | None
    roots: list = field(default_factory=list)
    indicator_samples: list = field(default_factory=list)
    density_table: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    certified_radius: float = 0.0
    notes: list = field(default_factory=list)

    def indicator(self, theta: float) -> float | None:
        for th, h in self.indicator_samples:
            if abs(th - theta) < 1e-12:
                return h
        return None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "zero_count_rhp": self.zero_count_rhp,
            "certified_radius": self.certified_radius,
            "roots": [{"re": z.real, "im": z.imag, "residual": res} for z, res in self.roots],
            "indicator": [{"theta": th, "h": h} for th, h in self.indicator_samples],
            "density": [{"r": r, "alpha": a, "beta": b, "value": v} for r, (a, b), v in self.density_table],
            "notes": list(self.notes),
            "indicator_is_estimate": True,
        }


def hurwitz_verdict(T: TruncatedEntireFunction, params: VerdictParams | None = None) -> StabilityReport:
    """Run the counting, root and indicator checks on ``T`` and combine them.

    Verdict rules, in order: ``inconclusive`` when the truncation or an
    iteration cannot be trusted; ``unstable`` when a zero is counted or found
    with positive real part, or ``h(0) < h(pi) - tol``; ``boundary`` when a zero
    lies on (or within ``axis_tol`` of) the imaginary axis; ``stable`` otherwise.
    """
    p = params or VerdictParams()
    report = StabilityReport(zero_count_rhp=None)
    boundary = False
    inconclusive = False

    try:
        wr = count_zeros_detail(T, p.R)
        report.zero_count_rhp = wr.count
    except (TruncationError, NonConvergence) as exc:
        inconclusive = True
        report.notes.append(f"zero count: {exc}")
    except ContourTooClose as exc:
        boundary = True
        report.notes.append(f"zero count: {exc}")

    rho = certified_radius(T, p.R)
    report.certified_radius = rho
    try:
        if p.root_finder is not None:
            # the finder certifies its own region
            report.roots = list(p.root_finder())
        else:
            roots = poly_roots(T.coeffs[::-1]) if T.N >= 1 else []
            report.roots = [(z, res) for z, res in roots if abs(z) < rho]
    except (NonConvergence, ContourTooClose) as exc:
        inconclusive = True
        report.notes.append(f"roots: {exc}")

    ev = p.evaluator or T
    radii = p.radii if p.radii is not None else np.linspace(0.5 * p.R, p.R, 12)
    for theta in (0.0, math.pi / 2, math.pi):
        try:
            est = indicator_estimate(ev, theta, radii)
            report.indicator_samples.append((theta, est.h))
        except EvaluationUnderflow as exc:
            report.notes.append(f"indicator: {exc}")

    d_radii = p.density_radii if p.density_radii is not None else [rho] if rho > 0 else []
    eps = p.epsilon
    for r in d_radii:
        for sector in ((0.0, eps), (eps, math.pi - eps), (math.pi - eps, math.pi)):
            report.density_table.append((r, sector, root_density(report.roots, r, *sector)))

    h0, hpi = report.indicator(0.0), report.indicator(math.pi)
    if inconclusive:
        report.verdict = INCONCLUSIVE
    elif (report.zero_count_rhp or 0) > 0 or any(z.real > p.axis_tol for z, _ in report.roots):
        report.verdict = UNSTABLE
    elif boundary or any(abs(z.real) <= p.axis_tol for z, _ in report.roots):
        report.verdict = BOUNDARY
    elif h0 is not None and hpi is not None and h0 < hpi - p.indicator_tol:
        report.verdict = UNSTABLE
    elif h0 is None or hpi is None:
        report.verdict = INCONCLUSIVE
    else:
        report.verdict = STABLE
    return report
