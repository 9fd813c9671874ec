"""Command-line driver: ``build``, ``verify`` and ``poly`` subcommands.

Exit codes: 0 ok, 1 property violated, 2 bad input, 3 inconclusive.

A run configuration is a JSON object::

    {"name": "...", "psi": {...} | "fixture-name", "lp1": {...},
     "kind": "shift1" | "shift0", "deflate": true | false,
     "truncation": {"R": 30, "tau": 1e-12, "N": 60},
     "verdict": {"R": 10, "radii": [...], "evaluator": "taylor" | "integral",
                 "evaluator_R": 62, "root_finder": "poly" | "boxes", "box": [x0, x1, y0, y1],
                 "epsilon": 0.3, "density_radii": [...]},
     "series": "path/to/series.json", "expect": "stable" | "unstable" | "boundary"}

Command-line ``--radius`` and ``--tolerance`` override the truncation values.
A configuration may instead hold ``{"runs": [config, ...]}``; runs are then
executed concurrently up to ``--jobs`` and each writes to its own directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpora
from .construct import (
    SHIFT0,
    SHIFT1,
    RepresentationEvaluator,
    TruncatedEntireFunction,
    choose_truncation,
    construct_entire,
    default_kind,
    multiplier_sequence,
)
from .errors import ConfigError, HurwitzError
from .lp1 import LP1Function
from .stability import (
    BOUNDARY,
    INCONCLUSIVE,
    STABLE,
    UNSTABLE,
    VerdictParams,
    find_zeros,
    hurwitz_verdict,
    poly_roots,
    routh_hurwitz,
)
from .stability.polynomial import multiplier_polynomial
from .stieltjes import S_INV, ClosedFormPsi, classify, psi_from_dict, psi_tag, value_at_zero

log = logging.getLogger("hurwitz_stable")

EXIT_OK, EXIT_VIOLATED, EXIT_BAD_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
DEFAULT_RADIUS = 20.0
DEFAULT_TOLERANCE = 1e-12
EXPECTATIONS = (STABLE, UNSTABLE, BOUNDARY)


@dataclass
class RunConfig:
    name: str
    psi: object
    psi_spec: dict
    F: LP1Function
    kind: str
    deflate: bool
    R: float
    tau: float
    N: int | None
    verdict: dict = field(default_factory=dict)
    series: Path | None = None
    expect: str = STABLE
    seed: int = corpora.DEFAULT_SEED

    @classmethod
    def from_dict(cls, data: dict, *, radius: float | None = None, tolerance: float | None = None,
                  base_dir: Path | None = None, expect: str | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("a run configuration must be a JSON object")
        if "psi" not in data:
            raise ConfigError("configuration is missing 'psi'")
        spec = data["psi"]
        try:
            psi = corpora.psi_fixture(spec) if isinstance(spec, str) else psi_from_dict(spec)
            F = LP1Function.from_dict(data.get("lp1"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid psi or lp1 spec: {exc}") from exc
        kind = data.get("kind") or default_kind(psi)
        if kind not in (SHIFT1, SHIFT0):
            raise ConfigError(f"kind must be {SHIFT1!r} or {SHIFT0!r}")
        if kind == SHIFT0 and math.isinf(value_at_zero(psi)):
            raise ConfigError(f"multiplier kind {kind} needs a finite psi(0)")
        trunc = data.get("truncation", {}) or {}
        R = float(radius if radius is not None else trunc.get("R", DEFAULT_RADIUS))
        tau = float(tolerance if tolerance is not None else trunc.get("tau", DEFAULT_TOLERANCE))
        N = trunc.get("N")
        if not (R > 0 and tau > 0):
            raise ConfigError("radius and tolerance must be positive")
        deflate = data.get("deflate")
        if deflate is None:
            deflate = psi_tag(psi) == S_INV and kind == SHIFT0 and value_at_zero(psi) == 0
        exp = expect or data.get("expect", STABLE)
        if exp not in EXPECTATIONS:
            raise ConfigError(f"expect must be one of {EXPECTATIONS}")
        series = data.get("series")
        if series is not None:
            series = Path(series)
            if not series.is_absolute() and base_dir is not None:
                series = base_dir / series
        verdict = dict(data.get("verdict", {}) or {})
        unknown = set(verdict) - {"R", "radii", "evaluator", "evaluator_R", "root_finder", "box",
                                  "epsilon", "density_radii", "indicator_tol", "axis_tol"}
        if unknown:
            raise ConfigError(f"unknown verdict options {sorted(unknown)}")
        return cls(str(data.get("name", "run")), psi, spec if isinstance(spec, dict) else {"fixture": spec},
                   F, kind, bool(deflate), R, tau, None if N is None else int(N), verdict, series, exp)

    def build(self) -> TruncatedEntireFunction:
        if self.series is not None:
            data = json.loads(self.series.read_text())
            return TruncatedEntireFunction.from_dict(data["function"])
        N = self.N if self.N is not None else choose_truncation(self.psi, self.F, self.R, self.tau,
                                                                kind=self.kind)
        T = construct_entire(self.psi, self.F, N, kind=self.kind)
        return T.deflate() if self.deflate else T


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc


def _formula(cfg: RunConfig) -> str:
    """Short description of the function that was built."""
    psi = cfg.psi
    if isinstance(psi, ClosedFormPsi) and cfg.F == LP1Function.exp(1.0):
        if psi.kind == "special_S" and cfg.kind == SHIFT1:
            return f"{psi.a:g} e^z + {psi.b:g} (e^z - 1)/z"
        if psi.kind == "special_Sinv" and cfg.kind == SHIFT0:
            return f"({psi.a:g} + {psi.b:g} z) e^z"
    shift = "k+1" if cfg.kind == SHIFT1 else "k"
    base = "z^k/k!" if cfg.F == LP1Function.exp(1.0) else "f_k z^k"
    out = f"sum_k psi({shift}) {base}"
    return out + " divided by z" if cfg.deflate else out


def _provenance(cfg: RunConfig, T: TruncatedEntireFunction) -> dict:
    tag = psi_tag(cfg.psi)
    try:
        kind_of_psi = classify(cfg.psi)
    except HurwitzError:
        kind_of_psi = "constant"
    return {
        "construction": _formula(cfg),
        "multiplier": cfg.kind,
        "psi_class": tag,
        "psi_kind": kind_of_psi,
        "N": T.N,
        "R": cfg.R,
        "tau": cfg.tau,
        "tail_bound_at_R": T.tail_bound(cfg.R),
        "roundoff_at_R": T.roundoff(cfg.R),
        "psi": cfg.psi_spec,
        "lp1": cfg.F.to_dict(),
    }


def write_series(cfg: RunConfig, T: TruncatedEntireFunction, out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / "series.json"
    path.write_text(json.dumps({"function": T.to_dict(), "provenance": _provenance(cfg, T)}, indent=1))
    return path


def _verdict_params(cfg: RunConfig) -> tuple[VerdictParams, list]:
    v = cfg.verdict
    notes = []
    R = float(v.get("R", 10.0))
    p = VerdictParams(R=R, radii=v.get("radii"), epsilon=float(v.get("epsilon", 0.3)),
                      density_radii=v.get("density_radii"),
                      indicator_tol=float(v.get("indicator_tol", 0.05)),
                      axis_tol=float(v.get("axis_tol", 1e-9)))
    evaluator = v.get("evaluator", "taylor")
    finder = v.get("root_finder", "poly")
    if evaluator not in ("taylor", "integral") or finder not in ("poly", "boxes"):
        raise ConfigError("evaluator must be taylor|integral and root_finder poly|boxes")
    if evaluator == "integral" or finder == "boxes":
        radii = p.radii if p.radii is not None else [R]
        ev_R = float(v.get("evaluator_R", 1.04 * max(max(radii), R)))
        ev = RepresentationEvaluator(cfg.psi, cfg.F, R=ev_R)
        notes.append(f"integral-representation evaluator on |z| <= {ev_R:g} ({ev.n_nodes} nodes)")
        if evaluator == "integral":
            p.evaluator = ev
        if finder == "boxes":
            box = tuple(v.get("box", (-ev_R, ev_R, -ev_R, ev_R)))
            p.root_finder = lambda: find_zeros(ev, ev.derivative, box)
    return p, notes


def exit_code(verdict: str, expect: str) -> int:
    if verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if verdict == expect else EXIT_VIOLATED


def _write_csv(path: Path, header: list, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_report(report, out: Path, extra: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "roots.csv", ["re", "im", "residual"],
               [[repr(z.real), repr(z.imag), repr(res)] for z, res in report.roots])
    _write_csv(out / "indicator.csv", ["theta", "h"],
               [[repr(th), repr(h)] for th, h in report.indicator_samples])
    _write_csv(out / "density.csv", ["r", "alpha", "beta", "value"],
               [[repr(r), repr(a), repr(b), repr(d)] for r, (a, b), d in report.density_table])
    summary = report.to_dict()
    summary.update(extra)
    (out / "summary.json").write_text(json.dumps(summary, indent=1, default=_json_default))


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def run_verify(cfg: RunConfig, out: Path) -> int:
    T = cfg.build()
    write_series(cfg, T, out)
    params, notes = _verdict_params(cfg)
    report = hurwitz_verdict(T, params)
    report.notes.extend(notes)
    code = exit_code(report.verdict, cfg.expect)
    write_report(report, out, {"name": cfg.name, "expect": cfg.expect, "exit_code": code, "seed": cfg.seed,
                               "N": T.N, "deflated": T.deflated, "construction": _formula(cfg)})
    log.info("%s: verdict %s (expected %s) -> exit %d", cfg.name, report.verdict, cfg.expect, code)
    return code


# ------------------------------------------------------------- commands ---

def _configs(args) -> list[tuple[dict, Path]]:
    data = _load_json(args.config)
    base = Path(args.config).resolve().parent
    runs = data.get("runs") if isinstance(data, dict) and "runs" in data else [data]
    if not runs:
        raise ConfigError("no runs in configuration")
    return [(r, base) for r in runs]


def _combine(codes: list[int]) -> int:
    for c in (EXIT_BAD_INPUT, EXIT_VIOLATED, EXIT_INCONCLUSIVE):
        if c in codes:
            return c
    return EXIT_OK


def _job_dirs(cfgs: list[RunConfig], out: Path) -> list[Path]:
    if len(cfgs) == 1:
        return [out]
    return [out / f"{i:03d}_{c.name}" for i, c in enumerate(cfgs)]


def cmd_build(args) -> int:
    cfgs = [RunConfig.from_dict(d, radius=args.radius, tolerance=args.tolerance, base_dir=b)
            for d, b in _configs(args)]
    out = Path(args.out)
    for cfg, d in zip(cfgs, _job_dirs(cfgs, out)):
        T = cfg.build()
        path = write_series(cfg, T, d)
        print(f"{cfg.name}: N={T.N} tail({cfg.R:g})={T.tail_bound(cfg.R):.3e} -> {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfgs = [RunConfig.from_dict(d, radius=args.radius, tolerance=args.tolerance, base_dir=b,
                                expect=args.expect) for d, b in _configs(args)]
    for c in cfgs:
        c.seed = args.seed
    dirs = _job_dirs(cfgs, Path(args.out))

    def job(pair):
        cfg, d = pair
        try:
            return run_verify(cfg, d)
        except ConfigError as exc:
            print(f"{cfg.name}: bad input: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        codes = list(pool.map(job, zip(cfgs, dirs)))
    for cfg, code in zip(cfgs, codes):
        print(f"{cfg.name}: exit {code}")
    return _combine(codes)


def _parse_numbers(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers from {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"need finite numbers, got {text!r}")
    return vals


def _parse_psi(text: str):
    try:
        if text.lstrip().startswith("{"):
            return psi_from_dict(json.loads(text))
        return corpora.psi_fixture(text)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse psi {text!r}: {exc}") from exc


def cmd_poly(args) -> int:
    if (args.coeffs is None) == (args.roots is None):
        raise ConfigError("give exactly one of --coeffs or --roots")
    if args.roots is not None:
        roots = np.asarray(_parse_numbers(args.roots))
        p = np.polynomial.polynomial.polyfromroots(roots).real
    else:
        p = np.asarray(_parse_numbers(args.coeffs))
        while p.size > 1 and p[-1] == 0:
            p = p[:-1]
        if p.size < 2:
            raise ConfigError("the polynomial must have degree >= 1")
        roots = np.array([z for z, _ in poly_roots(p[::-1])])
    psi = _parse_psi(args.psi)
    kind = default_kind(psi)
    mult = multiplier_sequence(psi, kind, p.size - 1)
    q = multiplier_polynomial(p, mult)[::-1]
    # multiple roots come back split by about eps**(1/m); 1e-4 covers multiplicity up to 3
    if np.any(np.abs(np.imag(roots)) > 1e-4 * np.maximum(1.0, np.abs(roots))) or np.any(np.real(roots) >= 0):
        print("warning: hypothesis 'only negative roots' violated; the verdict below is not covered "
              "by the theorem", file=sys.stderr)
    verdict = routh_hurwitz(q[::-1])
    qroots = poly_roots(q[::-1])
    print("P_psi coefficients (ascending powers): " + ", ".join(f"{c:.17g}" for c in q))
    print(f"Routh-Hurwitz: {verdict}")
    print("roots:")
    for z, res in qroots:
        print(f"  {z.real:+.15g} {z.imag:+.15g}i  (residual {res:.2e})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "poly.json").write_text(json.dumps({
            "p": p.tolist(), "multipliers": mult.tolist(), "p_psi": q.tolist(), "verdict": verdict,
            "roots": [{"re": z.real, "im": z.imag, "residual": r} for z, r in qroots]}, indent=1))
    return EXIT_OK if verdict == "stable" else EXIT_VIOLATED


# ----------------------------------------------------------------- parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hurwitz-stable",
                                     description="Build and certify Hurwitz-stable entire functions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="run configuration (JSON)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--radius", type=float, default=None,
                       help=f"truncation radius R (default {DEFAULT_RADIUS:g})")
        p.add_argument("--tolerance", type=float, default=None,
                       help=f"tail tolerance tau (default {DEFAULT_TOLERANCE:g})")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        p.add_argument("--seed", type=int, default=corpora.DEFAULT_SEED)

    b = sub.add_parser("build", help="write a truncated series with its tail bound")
    common(b)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="count zeros, locate roots and report a verdict")
    common(v)
    v.add_argument("--expect", choices=EXPECTATIONS, default=None)
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("poly", help="stability of P_psi(z) = sum p_k psi(k+1) z^k")
    p.add_argument("--coeffs", help="comma-separated p_0, p_1, ... (ascending powers)")
    p.add_argument("--roots", help="comma-separated roots of P (monic)")
    p.add_argument("--psi", default="inv_z", help="fixture name or JSON psi spec")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=corpora.DEFAULT_SEED)
    p.set_defaults(func=cmd_poly)
    return parser


def _attach_number_lists(argv: list[str]) -> list[str]:
    """Turn ``--roots -1,-2`` into ``--roots=-1,-2`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--roots", "--coeffs") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_number_lists(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except HurwitzError as exc:
        if isinstance(exc, ValueError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
