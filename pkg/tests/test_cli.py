import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hurwitz_stable.cli import EXPECTATIONS, exit_code, main
from hurwitz_stable.construct import choose_truncation, construct_entire
from hurwitz_stable.corpora import config_path, psi_fixture
from hurwitz_stable.lp1 import LP1Function
from hurwitz_stable.stability import BOUNDARY, INCONCLUSIVE, STABLE, UNSTABLE
from hurwitz_stable.stability.verdict import VERDICTS


def run(args):
    return main([str(a) for a in args])


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# ------------------------------------------------------------------ build ---

def test_build_special_series(tmp_path):
    assert run(["build", "--config", config_path("inv_z"), "--out", tmp_path]) == 0
    data = json.loads((tmp_path / "series.json").read_text())
    coeffs = data["function"]["coeffs"]
    np.testing.assert_allclose(coeffs[:8], [1 / math.factorial(k + 1) for k in range(8)], rtol=1e-15)
    assert data["provenance"]["construction"] == "0 e^z + 1 (e^z - 1)/z"


def test_build_power_chooses_order(tmp_path):
    assert run(["build", "--config", config_path("power_R30"), "--out", tmp_path]) == 0
    data = json.loads((tmp_path / "series.json").read_text())
    expected = choose_truncation(psi_fixture("inv_sqrt"), LP1Function.exp(), 30.0, 1e-12)
    assert data["function"]["N"] == expected
    assert data["provenance"]["tail_bound_at_R"] <= 1e-12


def test_build_missing_psi(tmp_path, capsys):
    cfg = write_config(tmp_path, {"name": "broken"})
    assert run(["build", "--config", cfg, "--out", tmp_path / "o"]) == 2
    assert "psi" in capsys.readouterr().err


@pytest.mark.parametrize("data", [
    {"psi": "no_such_fixture"},
    {"psi": "inv_z", "kind": "shift0"},
    {"psi": {"closed_form": {"kind": "power_delta", "delta": 1.5}}},
    {"psi": "inv_sqrt", "verdict": {"evaluator": "magic"}},
])
def test_invalid_configs_exit_2(tmp_path, data):
    cfg = write_config(tmp_path, data)
    assert run(["verify", "--config", cfg, "--out", tmp_path / "o"]) == 2


def test_unparseable_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["build", "--config", bad, "--out", tmp_path]) == 2
    assert run(["build", "--config", tmp_path / "absent.json", "--out", tmp_path]) == 2


def test_radius_flag_overrides(tmp_path):
    run(["build", "--config", config_path("inv_sqrt"), "--out", tmp_path, "--radius", 5, "--tolerance", 1e-6])
    prov = json.loads((tmp_path / "series.json").read_text())["provenance"]
    assert prov["R"] == 5.0 and prov["tau"] == 1e-6 and prov["tail_bound_at_R"] <= 1e-6


# ----------------------------------------------------------------- verify ---

def test_verify_generic_writes_tables(tmp_path):
    assert run(["verify", "--config", config_path("inv_sqrt"), "--out", tmp_path]) == 0
    assert read_csv(tmp_path / "roots.csv")[0] == ["re", "im", "residual"]
    assert read_csv(tmp_path / "indicator.csv")[0] == ["theta", "h"]
    assert read_csv(tmp_path / "density.csv")[0] == ["r", "alpha", "beta", "value"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["verdict"] == STABLE and summary["exit_code"] == 0
    rows = read_csv(tmp_path / "indicator.csv")[1:]
    assert [float(r[0]) for r in rows] == pytest.approx([0.0, math.pi / 2, math.pi])


def test_verify_special_expected_boundary(tmp_path):
    assert run(["verify", "--config", config_path("inv_z"), "--out", tmp_path]) == 0
    assert run(["verify", "--config", config_path("inv_z"), "--out", tmp_path, "--expect", "stable"]) == 1


def test_verify_counterexample_expected_unstable(tmp_path):
    # expected by the stated claim; the computed function is stable, so this exits 1
    assert run(["verify", "--config", config_path("shifted_power_expect_unstable"), "--out", tmp_path]) == 0


def test_verify_smaller_shift_expected_unstable(tmp_path):
    assert run(["verify", "--config", config_path("shifted_power_right"), "--out", tmp_path]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["verdict"] == UNSTABLE and summary["zero_count_rhp"] == 2


def test_verify_short_truncation_is_inconclusive(tmp_path):
    assert run(["verify", "--config", config_path("truncation_too_small"), "--out", tmp_path]) == 3


def test_verify_value_zero_branch(tmp_path):
    assert run(["verify", "--config", config_path("sinv_atom_lp1"), "--out", tmp_path]) == 0


def test_verify_multiple_runs(tmp_path):
    assert run(["verify", "--config", config_path("theorem_fixtures"), "--out", tmp_path, "--jobs", 4]) == 0
    dirs = sorted(p.name for p in tmp_path.iterdir())
    assert len(dirs) == 7 and dirs[0].startswith("000_")


def test_build_verify_round_trip_is_exact(tmp_path):
    cfg = {"name": "rt", "psi": "mixed", "lp1": {"alpha": 1.0, "deltas": [0.5]}, "truncation": {"R": 12}}
    assert run(["build", "--config", write_config(tmp_path, cfg), "--out", tmp_path / "b"]) == 0
    reload = {"name": "rt", "psi": "mixed", "series": str(tmp_path / "b" / "series.json"),
              "verdict": {"R": 10}}
    assert run(["verify", "--config", write_config(tmp_path, reload, "v.json"), "--out", tmp_path / "v"]) == 0
    a = json.loads((tmp_path / "b" / "series.json").read_text())["function"]["coeffs"]
    b = json.loads((tmp_path / "v" / "series.json").read_text())["function"]["coeffs"]
    direct = construct_entire(psi_fixture("mixed"), LP1Function(1.0, 0, 1.0, (0.5,)), R=12.0).coeffs
    assert np.array_equal(np.array(a), np.array(b)) and np.array_equal(np.array(a), direct)


def test_exit_codes_are_total():
    table = {(v, e): exit_code(v, e) for v in VERDICTS for e in EXPECTATIONS}
    assert set(table.values()) <= {0, 1, 3}
    for (v, e), code in table.items():
        assert code == (3 if v == INCONCLUSIVE else 0 if v == e else 1)
    assert exit_code(BOUNDARY, BOUNDARY) == 0 and exit_code(STABLE, UNSTABLE) == 1


# ------------------------------------------------------------------- poly ---

def test_poly_from_roots(capsys):
    assert run(["poly", "--roots", "-1,-2", "--psi", "inv_z"]) == 0
    out = capsys.readouterr().out
    first = out.splitlines()[0].split(":")[1]
    assert [float(x) for x in first.split(",")] == pytest.approx([2.0, 1.5, 1 / 3], rel=1e-15)
    assert "stable" in out and "-2.25" in out and "0.968245836551854" in out


def test_poly_from_coefficients(tmp_path):
    assert run(["poly", "--coeffs", "1,3,3,1", "--out", tmp_path]) == 0
    data = json.loads((tmp_path / "poly.json").read_text())
    assert data["p_psi"] == pytest.approx([1.0, 1.5, 1.0, 0.25], rel=1e-15)
    assert data["verdict"] == "stable"


def test_poly_positive_root_warns(capsys):
    code = run(["poly", "--roots", "1,-2"])
    err = capsys.readouterr().err
    assert "only negative roots" in err and code == 1


@pytest.mark.parametrize("args", [["--coeffs", "1,x"], ["--roots", ""], [], ["--coeffs", "1,2", "--roots", "-1"],
                                  ["--coeffs", "1,2", "--psi", "nope"]])
def test_poly_parse_failures(args):
    assert run(["poly", *args]) == 2


def test_unknown_command_exits_2():
    assert run(["frobnicate"]) == 2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "hurwitz_stable.cli", "poly", "--roots", "-1,-2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Routh-Hurwitz: stable" in res.stdout
