import csv
import io as _io
import json
import subprocess
import sys

import numpy as np
import pytest

from oddwalk.cli import main

from .test_walk import printed_k4


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_graph_json(capsys):
    code, out, _ = run(capsys, "graph", "--k", "4")
    data = json.loads(out)
    assert code == 0
    assert data["vertex_count"] == 35 and data["strata_sizes"] == [1, 4, 12, 18]
    assert data["matches_closed_form"]


def test_graph_csv(capsys):
    code, out, _ = run(capsys, "graph", "--k", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["stratum,size,a,b,c", "0,1,0,0,3", "1,3,0,1,2", "2,6,2,1,0"]


def test_jacobi(capsys):
    code, out, _ = run(capsys, "jacobi", "--k", "4", "--mode", "paper")
    assert code == 0 and json.loads(out)["omega"] == [4, 3, 6]
    code, out, _ = run(capsys, "jacobi", "--mode", "limit", "--levels", "5")
    assert json.loads(out)["omega"] == [1, 1, 2, 2]


def test_measure_cached(capsys, tmp_path):
    args = ("measure", "--k", "4", "--mode", "paper", "--cache-dir", str(tmp_path))
    code, out, _ = run(capsys, *args)
    assert code == 0 and len(json.loads(out)["atoms"]) == 4
    assert (tmp_path / "paper_k4_n4.json").exists()
    code, again, _ = run(capsys, *args)
    assert again == out


def test_measure_no_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ODDWALK_CACHE_DIR", str(tmp_path))
    code, out, _ = run(capsys, "measure", "--k", "3", "--no-cache")
    assert code == 0 and not list(tmp_path.iterdir())


def test_walk_csv_reproduces_printed_forms(capsys):
    code, out, _ = run(capsys, "walk", "--k", "4", "--mode", "paper", "--t-end", "10", "--t-steps", "101")
    assert code == 0
    rows = list(csv.DictReader(_io.StringIO(out)))
    assert len(rows) == 101 * 4
    t = np.linspace(0, 10, 101)
    ref = printed_k4(t)
    for m in range(3):
        q = np.array([complex(float(r["re_q"]), float(r["im_q"])) for r in rows if r["m"] == str(m)])
        assert np.max(np.abs(q - ref[m])) < 1e-10


def test_walk_json_and_output_file(capsys, tmp_path):
    path = tmp_path / "w.json"
    code, out, _ = run(capsys, "walk", "--k", "3", "--format", "json", "--t-steps", "3", "-o", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["strata_sizes"] == [1, 3, 6]


def test_walk_conservation_breach_exit_2(capsys):
    code, _, err = run(capsys, "walk", "--k", "4", "--tol", "conservation=-1", "--t-steps", "3")
    assert code == 2 and "conservation" in err


@pytest.mark.parametrize("argv", [
    ["graph", "--k", "x"],
    ["walk", "--bogus"],
    ["nosuchcommand"],
    [],
    ["walk", "--tol", "conservation"],
    ["walk", "--tol", "nope=1"],
    ["walk", "--t-steps", "0"],
    ["walk", "--t-start", "3", "--t-end", "1"],
    ["graph", "--k", "9"],
    ["qclt", "--convergence", "--k", "2,4"],
])
def test_usage_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_verify_exact_passes(capsys):
    code, out, _ = run(capsys, "verify", "--k", "4")
    assert code == 0 and "PASS" in out


def test_verify_paper_reports_expected_discrepancy(capsys):
    code, out, _ = run(capsys, "verify", "--k", "4", "--mode", "paper")
    assert code == 4 and "EXPECTED DISCREPANCY" in out


def test_verify_strict_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--k", "4", "--tol", "oracle=1e-20")
    assert code == 3 and "FAIL" in out


def test_qclt_convergence_table(capsys):
    code, out, err = run(capsys, "qclt", "--convergence")
    assert code == 0 and err == ""
    rows = list(csv.DictReader(_io.StringIO(out)))
    gaps = [float(r["gap"]) for r in rows]
    assert [int(r["k"]) for r in rows] == [4, 8, 16, 32, 64]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert run(capsys, "qclt", "--convergence")[1] == out


def test_qclt_convergence_json(capsys):
    code, out, _ = run(capsys, "qclt", "--convergence", "--k", "4,16", "--m", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["monotone"] and len(data["rows"]) == 2


def test_qclt_limit_series(capsys):
    code, out, _ = run(capsys, "qclt", "--t-end", "2", "--t-steps", "3", "--m-max", "2")
    assert code == 0
    rows = list(csv.DictReader(_io.StringIO(out)))
    assert len(rows) == 9
    assert float(rows[0]["re_q"]) == pytest.approx(1, abs=1e-12)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "oddwalk", "graph", "--k", "2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["vertex_count"] == 3
