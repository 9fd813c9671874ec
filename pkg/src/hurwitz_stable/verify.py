"""Direct numerical checks of the analytic steps behind the stability theorems.

``mal_integral`` evaluates ``int_0^inf u(t) sin(y t) dt`` for a non-increasing
kernel by folding the half-line onto ``(0, pi)``::

    (1/y) int_0^pi sum_j [u((s + 2j pi)/y) - u((s + (2j+1) pi)/y)] sin(s) ds

where every bracket is non-negative, which is what makes the integral
positive.  ``im_transform_check`` compares the imaginary part of
``exp(-z) E(z)`` from the Taylor series with minus that integral, and the
suites run the full construction and stability pipeline clause by clause.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .construct import (
    RepresentationEvaluator,
    TruncatedEntireFunction,
    _as_repr,
    construct_entire,
    eval_taylor,
    representation_consistency,
)
from .errors import (
    ContourTooClose,
    DomainError,
    HypothesisViolation,
    NonConvergence,
    SpecialPsi,
    TruncationError,
)
from .lp1 import LP1Function
from .measure import Measure, phi_from_log
from .quadrature import integrate
from .stability import (
    BOUNDARY,
    STABLE,
    VerdictParams,
    count_zeros_detail,
    hurwitz_verdict,
    indicator_estimate,
)
from .stieltjes import S_INV, classify, membership_check, psi_tag, value_at_zero

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


# ------------------------------------------------------------------ kernels ---

@dataclass(frozen=True)
class DecreasingKernelSpec:
    """``u(t) = exp(-x t) (b + phi(1 - t))`` on ``(0, 1)`` and 0 beyond.

    With ``variant_m`` the constant ``b`` is dropped; ``a`` then feeds the
    separate ``-a y / |z|**2`` term of the inverse-class identity.
    """

    x: float
    b: float = 0.0
    measure: Measure = field(default_factory=Measure)
    variant_m: bool = False
    a: float = 0.0

    def __post_init__(self):
        if not (self.x >= 0 and math.isfinite(self.x)):
            raise DomainError("the damping x must be finite and >= 0")
        if not self.b >= 0 or not self.a >= 0:
            raise DomainError("a and b must be >= 0")

    @property
    def support(self) -> float:
        return 1.0

    @property
    def breaks(self) -> np.ndarray:
        return np.array([1.0])

    @property
    def constant(self) -> float:
        return 0.0 if self.variant_m else self.b

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t > 0) & (t < 1)
        if np.any(inside):
            ti = t[inside]
            val = np.full(ti.shape, self.constant)
            if not self.measure.is_zero:
                val = val + phi_from_log(self.measure, -np.log1p(-ti))
            out[inside] = np.exp(-self.x * ti) * val
        return out


@dataclass(frozen=True)
class TabulatedKernel:
    """Piecewise-linear kernel through ``(t_i, u_i)``, zero beyond the last node.

    Between 0 and the first node the first value is held constant.
    """

    t: tuple
    values: tuple

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0) or t[0] < 0:
            raise DomainError("nodes must be increasing, non-negative and at least two")
        if len(self.values) != t.size:
            raise DomainError("one value per node is required")

    @property
    def support(self) -> float:
        return float(self.t[-1])

    @property
    def breaks(self) -> np.ndarray:
        return np.asarray(self.t, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        nodes = np.asarray(self.t, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        out = np.interp(t, nodes, vals)
        return np.where((t > 0) & (t < nodes[-1]), out, 0.0)


@dataclass(frozen=True)
class FunctionKernel:
    """Any vectorised ``f`` restricted to ``(0, support)``."""

    f: Callable
    support: float = 1.0

    @property
    def breaks(self) -> np.ndarray:
        return np.array([self.support])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t > 0) & (t < self.support)
        if np.any(inside):
            out[inside] = np.asarray(self.f(t[inside]), dtype=float)
        return out


def as_kernel(u, support: float = 1.0):
    if isinstance(u, (DecreasingKernelSpec, TabulatedKernel, FunctionKernel)):
        return u
    if callable(u):
        return FunctionKernel(u, support)
    raise DomainError("a kernel must be a kernel object or a vectorised callable")


def _sample_grid(support: float, n: int = 400) -> np.ndarray:
    geo = support * np.logspace(-9, 0, n // 2, endpoint=False)
    lin = np.linspace(0.0, support, n // 2, endpoint=False)[1:]
    return np.unique(np.concatenate([geo, lin, [support * (1 - 1e-12)]]))


class KernelHypotheses(NamedTuple):
    non_increasing: bool
    strictly_decreasing_near_zero: bool
    worst_increase: float


def kernel_hypotheses(u, support: float = 1.0, rel_slack: float = 1e-12) -> KernelHypotheses:
    """Sampled check of monotonicity, strict decrease near 0 and ``u >= 0``.

    ``u`` vanishes beyond its support, so a negative value anywhere would be
    an increase and is reported as one.
    """
    u = as_kernel(u, support)
    t = _sample_grid(u.support)
    v = u(t)
    scale = max(float(np.max(np.abs(v))), 1e-300)
    steps = np.diff(np.concatenate([v, [0.0]]))
    worst = float(max(np.max(steps), 0.0))
    non_inc = worst <= rel_slack * scale
    head = v[: max(4, t.size // 20)]
    strict = bool(np.all(np.diff(head) < 0))
    return KernelHypotheses(non_inc, strict, worst)


def kernel_mass(u, support: float = 1.0) -> float:
    """``int_0^inf u(t) dt``."""
    u = as_kernel(u, support)
    bps = u.support * np.array([1e-12, 1e-9, 1e-6, 1e-3, 0.1, 0.5])
    bps = np.unique(np.concatenate([bps, u.breaks[u.breaks < u.support]]))
    res = integrate(u, 0.0, u.support, breakpoints=bps, rel_tol=1e-13, abs_tol=1e-16)
    return float(res.value)


# ------------------------------------------------------------ MaL integral ---

def mal_integral(u, y: float, *, support: float = 1.0, check: bool = True,
                 abs_tol: float = 1e-15) -> float:
    """``int_0^inf u(t) sin(y t) dt`` through the period-folding identity.

    Raises :class:`HypothesisViolation` when ``check`` is on and sampling
    finds an increase of ``u``.  A kernel that is constant near 0 is accepted
    (the result may then be zero).
    """
    if not (y > 0 and math.isfinite(y)):
        raise DomainError("y must be finite and > 0")
    u = as_kernel(u, support)
    if check:
        hyp = kernel_hypotheses(u)
        if not hyp.non_increasing:
            raise HypothesisViolation(f"kernel increases by {hyp.worst_increase:.3e}")
    n_terms = 2 * (int(math.ceil(y * u.support / (2 * math.pi))) + 1)
    shifts = math.pi * np.arange(n_terms)
    signs = np.where(np.arange(n_terms) % 2 == 0, 1.0, -1.0)

    def g(s):
        args = (s[:, None] + shifts[None, :]) / y
        return (u(args.ravel()).reshape(args.shape) @ signs) * np.sin(s)

    cuts = (y * u.breaks[:, None] - shifts[None, :]).ravel()
    bps = np.unique(cuts[(cuts > 0) & (cuts < math.pi)])
    res = integrate(g, 0.0, math.pi, breakpoints=bps, rel_tol=1e-13, abs_tol=abs_tol * y)
    return float(res.value) / y


def mal_integral_direct(u, y: float, *, support: float = 1.0) -> float:
    """Same integral by plain adaptive quadrature on ``(0, support)``."""
    u = as_kernel(u, support)
    n = int(math.ceil(y * u.support / math.pi))
    bps = np.concatenate([math.pi / y * np.arange(1, n + 1), u.breaks,
                          u.support * np.array([1e-9, 1e-6, 1e-3])])
    bps = np.unique(bps[(bps > 0) & (bps < u.support)])
    res = integrate(lambda t: u(t) * np.sin(y * t), 0.0, u.support, breakpoints=bps,
                    rel_tol=1e-13, abs_tol=1e-16)
    return float(res.value)


def positivity_margin(u, support: float = 1.0) -> float:
    """Noise margin ``1e-12 * int u`` below which a value counts as inconclusive."""
    return 1e-12 * abs(kernel_mass(u, support))


# ---------------------------------------------------------- Im identities ---

class ImCheck(NamedTuple):
    lhs: float
    rhs: float
    negative: bool
    budget: float

    @property
    def agrees(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.budget


def _kernel_for(psi, x: float) -> DecreasingKernelSpec:
    rep = _as_repr(psi)
    inverse = rep.class_tag == S_INV
    return DecreasingKernelSpec(x=x, b=0.0 if inverse else rep.b, measure=rep.sigma,
                                variant_m=inverse, a=rep.a if inverse else 0.0)


def im_transform_check(psi, z: complex, *, T: TruncatedEntireFunction | None = None,
                       tau: float = 1e-15) -> ImCheck:
    """Compare ``Im(e^{-z} E(z))`` (tag S) or ``Im(z^{-1} e^{-z} E(z))`` (tag S_inv).

    The left side comes from a certified Taylor truncation and the right side
    is ``-int u sin(y t) dt`` (plus ``-a y/|z|**2`` for tag S_inv).  The flag
    reports ``lhs < 0``.
    """
    z = complex(z)
    x, y = z.real, z.imag
    if x < 0 or y < 0:
        raise DomainError("the identity is checked for Re z >= 0 and Im z >= 0")
    rep = _as_repr(psi)
    inverse = rep.class_tag == S_INV
    if inverse and z == 0:
        raise DomainError("z = 0 is excluded for the inverse class")
    if T is None:
        T = construct_entire(rep, None, R=max(abs(z), 1.0), tau=tau)
    val, tail = eval_taylor(T, z)
    scale = abs(np.exp(-z)) / (abs(z) if inverse else 1.0)
    prefactor = np.exp(-z) / z if inverse else np.exp(-z)
    lhs = float((prefactor * complex(val)).imag)
    budget = scale * (float(tail) + T.roundoff(abs(z)))
    if y == 0:
        return ImCheck(lhs, 0.0, lhs < 0, budget + 1e-15)
    u = _kernel_for(rep, x)
    rhs = -mal_integral(u, y)
    if inverse:
        rhs -= rep.a * y / (x * x + y * y)
    budget += 1e-10 * max(1.0, abs(rhs))
    return ImCheck(lhs, rhs, lhs < 0, budget)


# ----------------------------------------------------------------- suites ---

@dataclass
class ClauseResult:
    clause: str
    description: str
    status: str
    margin: float

    def row(self) -> list:
        return [self.clause, self.description, self.status, f"{self.margin:.6g}"]


@dataclass
class SuiteReport:
    name: str
    clauses: list = field(default_factory=list)
    verdict: object = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.clauses) and all(c.status == PASS for c in self.clauses)

    def clause(self, name: str) -> ClauseResult | None:
        return next((c for c in self.clauses if c.clause == name), None)

    def add(self, clause: str, description: str, ok: bool | None, margin: float) -> None:
        status = INCONCLUSIVE if ok is None else PASS if ok else FAIL
        self.clauses.append(ClauseResult(clause, description, status, float(margin)))

    def table(self) -> str:
        rows = [["clause", "property", "status", "worst margin"]] + [c.row() for c in self.clauses]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        return "\n".join("  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in rows)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "clauses": [{"clause": c.clause, "property": c.description, "status": c.status,
                         "margin": c.margin} for c in self.clauses],
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
            "notes": list(self.notes),
        }


@dataclass
class SuiteParams:
    R: float = 10.0
    tau: float = 1e-13
    consistency_radius: float = 10.0
    n_consistency: int = 20
    consistency_tol: float = 1e-8
    im_points: Sequence[complex] = (1j, 0.5 + 2j, 2 + 1j, 1 + 5j)
    indicator_radii: Sequence[float] | None = None
    indicator_tol: float = 0.05
    seed: int = 42
    verdict: VerdictParams | None = None


def _sample_points(radius: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.05, 1.0, n))
    th = rng.uniform(-math.pi, math.pi, n)
    return r * np.exp(1j * th)


def _is_generic(psi, report: SuiteReport) -> bool:
    if classify(psi) == "special":
        warnings.warn("psi is special; the closed-form remarks describe E instead", SpecialPsi,
                      stacklevel=3)
        report.notes.append("special psi: closed-form case")
        return False
    return True


def _expected_verdict(psi, generic: bool) -> str:
    """Stable, except for the special class-S case ``b/z`` whose roots lie on the axis."""
    if generic or psi_tag(psi) == S_INV:
        return STABLE
    rep = _as_repr(psi)
    return BOUNDARY if rep.a == 0 else STABLE


def _stability_clauses(report: SuiteReport, psi, F: LP1Function, p: SuiteParams, prefix: str,
                       generic: bool) -> None:
    tag = psi_tag(psi)
    mem = membership_check(psi, tag)
    report.add(f"{prefix}.class", f"psi satisfies the sign conditions of class {tag}",
               mem.passed, -mem.worst_value)

    pts = _sample_points(p.consistency_radius, p.n_consistency, p.seed)
    gap = representation_consistency(psi, F, pts)
    report.add(f"{prefix}.repr", "Taylor series and integral representation agree",
               gap <= p.consistency_tol, p.consistency_tol - gap)

    T = construct_entire(psi, F, R=p.R, tau=p.tau)
    zero_branch = tag == S_INV and value_at_zero(psi) == 0
    if zero_branch:
        report.add(f"{prefix}.root0", "psi(0) = 0 gives a simple root at z = 0",
                   T.coeffs[0] == 0 and T.coeffs[1] != 0, abs(float(T.coeffs[1])))
        T = T.deflate()

    try:
        wr = count_zeros_detail(T, p.R)
        report.add(f"{prefix}.count", f"no zeros with Re z > 0 and |z| < {p.R:g}",
                   wr.count == 0, 0.25 - wr.error if wr.count == 0 else -wr.count)
    except ContourTooClose as exc:
        expect_axis = _expected_verdict(psi, generic) == BOUNDARY
        report.add(f"{prefix}.count", "zero count on the right half-disk",
                   True if expect_axis else False, -float(exc.value or 0.0))
    except (TruncationError, NonConvergence) as exc:
        report.add(f"{prefix}.count", "zero count on the right half-disk", None, math.nan)
        report.notes.append(str(exc))

    vp = p.verdict or VerdictParams(R=p.R)
    verdict = hurwitz_verdict(T, vp)
    report.verdict = verdict
    re_max = max((z.real for z, _ in verdict.roots), default=-math.inf)
    expected = _expected_verdict(psi, generic)
    if expected == STABLE:
        report.add(f"{prefix}.roots", "computed roots lie in the open left half-plane",
                   re_max < 0, -re_max)
    h0, hpi = verdict.indicator(0.0), verdict.indicator(math.pi)
    if h0 is None or hpi is None:
        report.add(f"{prefix}.growth", "h(0) >= h(pi)", None, math.nan)
    else:
        report.add(f"{prefix}.growth", "h(0) >= h(pi)", h0 >= hpi - p.indicator_tol,
                   h0 - hpi + p.indicator_tol)
    report.add(f"{prefix}.verdict", f"verdict is {expected}", verdict.verdict == expected,
               0.0 if verdict.verdict == expected else -1.0)

    if p.indicator_radii is not None:
        ev = RepresentationEvaluator(psi, F, R=max(p.indicator_radii) * 1.04)
        worst = 0.0
        for theta in (0.0, math.pi / 2, math.pi):
            h = indicator_estimate(ev, theta, p.indicator_radii, fit_fraction=1.0).h
            target = F.alpha * max(math.cos(theta), 0.0)
            worst = max(worst, abs(h - target))
        report.add(f"{prefix}.indicator", "h(theta) = alpha max(cos theta, 0)",
                   worst <= p.indicator_tol, p.indicator_tol - worst)


def theorem1_suite(psi, params: SuiteParams | None = None) -> SuiteReport:
    """Stability clauses for the exponential-series function built from ``psi``."""
    p = params or SuiteParams()
    report = SuiteReport("exponential series")
    generic = _is_generic(psi, report)
    _stability_clauses(report, psi, LP1Function.exp(1.0), p, "E", generic)
    if generic:
        worst = math.inf
        ok = True
        for z in p.im_points:
            chk = im_transform_check(psi, z)
            ok &= chk.negative and chk.agrees
            worst = min(worst, -chk.lhs, chk.budget - abs(chk.lhs - chk.rhs))
        report.add("E.im", "Im part identity holds and is negative in the right quadrant", ok, worst)
    return report


def theorem2_suite(F: LP1Function, psi, params: SuiteParams | None = None) -> SuiteReport:
    """Stability clauses for the function built from an LP-I base ``F`` and ``psi``."""
    if F.m != 0 or F.C == 0:
        raise DomainError("the base function must satisfy F(0) != 0")
    p = params or SuiteParams()
    report = SuiteReport("LP-I base")
    generic = _is_generic(psi, report)
    _stability_clauses(report, psi, F, p, "F", generic)
    return report


def run_suites(jobs: Sequence[tuple], n_jobs: int = 1) -> list[SuiteReport]:
    """Run ``(kind, args)`` suite jobs, ``kind`` in {"theorem1", "theorem2"}, concurrently."""
    from concurrent.futures import ThreadPoolExecutor

    table = {"theorem1": theorem1_suite, "theorem2": theorem2_suite}

    def run(job):
        kind, args = job
        return table[kind](*args)

    if n_jobs <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(run, jobs))


__all__ = [
    "DecreasingKernelSpec", "TabulatedKernel", "FunctionKernel", "KernelHypotheses", "ImCheck",
    "ClauseResult", "SuiteReport", "SuiteParams", "as_kernel", "kernel_hypotheses", "kernel_mass",
    "mal_integral", "mal_integral_direct", "positivity_margin", "im_transform_check",
    "theorem1_suite", "theorem2_suite", "run_suites",
]
