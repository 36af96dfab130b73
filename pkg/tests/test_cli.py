import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from lanemden.cli import dumps, fmt, main, read_tolerances, InputError
from lanemden.radial import solve_radial


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out), "--threads", "1"])
    return code, out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_radial_writes_profile_and_landmarks(tmp_path):
    code, out = run(tmp_path, "radial", "--p", "3", "--m", "2")
    assert code == 0
    prof = solve_radial(3.0, 2)
    table = rows(out / "profile.csv")
    assert list(table[0]) == ["r", "u", "du"]
    assert len(table) == len(prof.grid)
    marks = json.loads((out / "landmarks.json").read_text())
    # 17 significant digits round-trip exactly
    for key in ("alpha", "r1", "s_p", "u_min", "eps_plus", "eps_minus"):
        assert marks[key] == getattr(prof, key)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "radial"
    assert sorted(manifest["outputs"]) == ["landmarks.json", "profile.csv"]
    assert manifest["parameters"]["p"] == 3.0


def test_invalid_exponent_exits_2(tmp_path, capsys):
    code, _ = run(tmp_path, "radial", "--p", "0.9", "--m", "2")
    assert code == 2
    assert "p must exceed 1" in capsys.readouterr().err


def test_missing_flag_exits_2(tmp_path):
    assert run(tmp_path, "radial")[0] == 2


def test_morse_single_points(tmp_path):
    code, out = run(tmp_path, "morse", "--p", "1.05")
    assert code == 0
    (row,) = rows(out / "morse.csv")
    assert row["m_full"] == "6"
    assert [row[f"m_{k}"] for k in range(1, 5)] == ["4", "3", "2", "2"]
    assert row["status"] == "ok"


def test_morse_sweep_is_even_and_deterministic(tmp_path):
    argv = ["morse", "--p-lo", "1.05", "--p-hi", "6", "--grid", "6"]
    code, out = run(tmp_path, *argv)
    assert code == 0
    table = rows(out / "morse.csv")
    assert len(table) == 6
    assert all(int(r["m_full"]) % 2 == 0 and int(r["m_full"]) >= 4 for r in table)
    first = (out / "morse.csv").read_bytes(), (out / "degeneracy.json").read_bytes()
    main([*argv, "--out", str(out), "--threads", "3"])
    assert ((out / "morse.csv").read_bytes(), (out / "degeneracy.json").read_bytes()) == first


def test_tolerance_overrides(tmp_path):
    tol = tmp_path / "tol.txt"
    tol.write_text("# looser degeneracy test\ndegeneracy_tol = 1e-3\n\n")
    code, out = run(tmp_path, "morse", "--p", "2", "--tol-overrides", str(tol))
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["tolerances"]["degeneracy_tol"] == 1e-3
    bad = tmp_path / "bad.txt"
    bad.write_text("mystery = 1\n")
    assert run(tmp_path, "morse", "--p", "2", "--tol-overrides", str(bad))[0] == 2
    bad.write_text("p_xtol = -1\n")
    with pytest.raises(InputError):
        read_tolerances(str(bad))
    bad.write_text("p_xtol 1\n")
    with pytest.raises(InputError):
        read_tolerances(str(bad))


def test_spectrum(tmp_path):
    code, out = run(tmp_path, "spectrum", "--p", "2", "--k", "0", "--count", "3")
    assert code == 0
    mus = [float(r["mu"]) for r in rows(out / "spectrum.csv")]
    assert mus[0] < mus[1] < 0.0 < mus[2]


def test_scan_reports_odd_crossings(tmp_path):
    code, out = run(tmp_path, "scan", "--j", "3", "--grid", "16")
    assert code == 0
    (level,) = json.loads((out / "scan.json").read_text())["levels"]
    assert level["crossing_count"] % 2 == 1
    assert all(c["verified"] for c in level["crossings"])


def test_asym_near_one(tmp_path):
    code, out = run(tmp_path, "asym", "--regime", "near-one")
    assert code == 0
    rep = json.loads((out / "asym.json").read_text())
    assert rep["c_tilde"] < 0 and rep["slope_rel_error"] < 0.1


def test_branch_k4(tmp_path):
    code, out = run(tmp_path, "branch", "--k", "4", "--origin-index", "0", "--max-points", "2")
    assert code == 0
    table = rows(out / "branch.csv")
    assert list(table[0]) == ["arclength", "p", "amplitude", "residual", "nodal_domain_count",
                              "quasi_radial", "cone_member", "energy"]
    assert table[0]["quasi_radial"] == "true" and table[0]["nodal_domain_count"] == "2"
    assert float(table[0]["residual"]) < 1e-8
    assert (out / "modes" / "point_001.csv").exists()
    assert run(tmp_path, "branch", "--k", "4", "--origin-index", "5")[0] == 2


def test_selftest(tmp_path, capsys):
    code, _ = run(tmp_path, "selftest")
    assert code == 0
    assert "FAIL" not in capsys.readouterr().out


def test_formatting():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(None) == "" and fmt(np.int64(3)) == "3"
    assert dumps({"a": [1.5, float("nan")], "b": {}}) == '{\n  "a": [1.5, null],\n  "b": {}\n}\n'


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "lanemden.cli", "radial", "--p", "2",
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0
