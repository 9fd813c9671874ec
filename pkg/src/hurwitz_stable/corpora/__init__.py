"""Fixed fixtures and seeded corpora shipped with the package.

``psi_fixtures.json`` names the Stieltjes functions used by the suites and the
command line; ``configs/`` holds ready-made run configurations.  The random
families (kernels, polynomials) are regenerated from a seed and the default
seed's output is checked in so that runs are reproducible byte for byte.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from ..measure import Measure
from ..stieltjes import psi_from_dict

DEFAULT_SEED = 42


def _read(name: str):
    return json.loads(resources.files(__package__).joinpath(name).read_text())


def psi_fixtures() -> dict:
    return _read("psi_fixtures.json")


def psi_fixture(name: str):
    specs = psi_fixtures()
    if name not in specs:
        raise KeyError(f"unknown psi fixture {name!r}; known: {sorted(specs)}")
    return psi_from_dict(specs[name])


def config_path(name: str):
    return resources.files(__package__).joinpath("configs", name if name.endswith(".json") else name + ".json")


def random_measure(rng: np.random.Generator) -> Measure:
    """One to three atoms, optionally plus a density piece."""
    m = Measure()
    for _ in range(int(rng.integers(1, 4))):
        m = m + Measure.atom(float(rng.uniform(0.05, 8.0)), float(rng.uniform(0.1, 2.0)))
    if rng.random() < 0.5:
        power = float(rng.uniform(-0.9, 0.5))
        decay = float(rng.uniform(0.2, 2.0)) if power >= 0 else float(rng.choice([0.0, 0.5]))
        m = m + Measure.density(float(rng.uniform(0.1, 1.0)), power, decay)
    return m


def generate_kernel_specs(n: int = 50, seed: int = DEFAULT_SEED) -> list[dict]:
    """Parameters ``x, b, measure`` of decreasing kernels."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = float(rng.choice([0.0, rng.uniform(0.0, 5.0)]))
        b = float(rng.choice([0.0, rng.uniform(0.0, 2.0)]))
        out.append({"x": x, "b": b, "measure": random_measure(rng).to_dict()})
    return out


def generate_negative_root_polynomials(n: int = 200, seed: int = DEFAULT_SEED,
                                       degrees=(1, 12), roots=(-5.0, -0.05)) -> list[dict]:
    """Polynomials ``prod(z - r_i)`` with roots uniform in ``roots``; ascending coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        deg = int(rng.integers(degrees[0], degrees[1] + 1))
        r = np.sort(rng.uniform(roots[0], roots[1], deg))
        coeffs = np.polynomial.polynomial.polyfromroots(r).real
        out.append({"roots": r.tolist(), "coeffs": coeffs.tolist()})
    return out


def kernel_specs() -> list[dict]:
    return _read("kernels_seed42.json")


def negative_root_polynomials() -> list[dict]:
    return _read("polynomials_seed42.json")


def write_seeded(directory, seed: int = DEFAULT_SEED) -> None:
    """Regenerate the seeded corpus files into ``directory``."""
    from pathlib import Path

    d = Path(directory)
    (d / f"kernels_seed{seed}.json").write_text(json.dumps(generate_kernel_specs(seed=seed), indent=1))
    (d / f"polynomials_seed{seed}.json").write_text(
        json.dumps(generate_negative_root_polynomials(seed=seed), indent=1))


__all__ = [
    "DEFAULT_SEED", "config_path", "generate_kernel_specs", "generate_negative_root_polynomials",
    "kernel_specs", "negative_root_polynomials", "psi_fixture", "psi_fixtures", "random_measure",
    "write_seeded",
]
