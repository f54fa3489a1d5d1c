import csv
import io
import json
import subprocess
import sys

import pytest

from blrefine.cli import main

GAUSS = '{"poly": ["0", "0", "1/2"]}'
QUARTIC_1_1 = '{"poly": ["0", "0", "1/2", "0", "1/4"]}'
QUARTIC_1_10 = '{"poly": ["0", "0", "1/2", "0", "1/40"]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_gaussian(capsys):
    code, out, _ = run(capsys, "analyze", "--potential", GAUSS, "--depth", "4")
    assert code == 0
    data = json.loads(out)
    assert [e["num"] for e in data["sequence"]["E"]] == [["1"], ["2"], ["3"], ["4"]]
    assert data["sequence"]["truncation"] == "completed"
    assert data["reverse_bl"]["certificate"]["positive"] is True


def test_analyze_quartic_truncates_at_E2(capsys):
    code, out, _ = run(capsys, "analyze", "--potential", QUARTIC_1_1, "--depth", "2")
    assert code == 0  # non-positivity is a result
    seq = json.loads(out)["sequence"]
    assert seq["truncation"] == "positivity-failed" and seq["failed_at"] == 2
    assert abs(seq["E"][1]["witness"]) < 0.5


def test_analyze_table(capsys):
    code, out, _ = run(capsys, "analyze", "--potential", GAUSS, "--depth", "2", "--output", "table")
    assert code == 0 and "truncation: completed" in out


@pytest.mark.parametrize("argv", [
    ["analyze", "--potential", '{"coeffs": ["1"]}'],
    ["analyze", "--potential", '{"poly": [0, 0, 0.5]}'],
    ["analyze", "--potential", GAUSS, "--depth", "0"],
    ["analyze"],
    ["bound", "--potential", GAUSS],
    ["bound", "--potential", GAUSS, "--f", "[0, 1.5]"],
    ["bound", "--potential", GAUSS, "--f", '["0","1"]', "--tol", "-1"],
    ["threshold", "--family", "quartic", "--bracket", "1"],
    ["frobnicate"],
    ["analyze", "--output", "xml", "--potential", GAUSS],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bound_gaussian_cubic(capsys):
    code, out, _ = run(capsys, "bound", "--potential", GAUSS, "--f", '["0","0","0","1"]', "--depth", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    assert rep["partial_sums"] == pytest.approx([27, 9, 15], abs=1e-8)
    assert rep["variance"] == pytest.approx(15, abs=1e-8)


def test_bound_quartic_depth2_strict(capsys):
    code, out, _ = run(capsys, "bound", "--potential", QUARTIC_1_10, "--f", '["0","0","1"]', "--depth", "2")
    rep = json.loads(out)
    assert code == 0 and rep["partial_sums"][1] < rep["variance"] < rep["partial_sums"][0]


def test_bound_exhausted(capsys):
    code, _, err = run(capsys, "bound", "--potential", QUARTIC_1_10, "--f", '["0","0","1"]', "--depth", "9")
    assert code == 1 and "refinement sequence exhausted" in err


def test_bound_csv(capsys):
    code, out, _ = run(capsys, "bound", "--potential", GAUSS, "--f", '["0","0","1"]', "--depth", "2",
                       "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["verdict"] for r in rows] == ["upper-ok", "lower-ok"]


@pytest.mark.parametrize("family, n, expected, tol", [
    ("quartic", "1", 0.666667, 1e-6),
    ("quartic", "2", 0.244017, 1e-6),
    ("xlog", "1", 0.129852, 1e-6),
])
def test_threshold(capsys, family, n, expected, tol):
    code, out, _ = run(capsys, "threshold", "--family", family, "--n", n, "--tol", "1e-8")
    assert code == 0
    assert json.loads(out)["normalized"] == pytest.approx(expected, abs=tol)


def test_threshold_invalid_bracket(capsys):
    code, _, err = run(capsys, "threshold", "--family", "xlog", "--n", "1", "--bracket", "1/2,1")
    assert code == 1 and "invalid bracket" in err


def test_threshold_sweep_csv(capsys):
    code, out, _ = run(capsys, "threshold", "--family", "quartic", "--n", "1", "--sweep", "0,1,5",
                       "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["positive"] for r in rows] == ["1", "1", "1", "0", "0"]


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"potential": {"poly": ["0", "0", "1/2"]}, "depth": 3}))
    code, out, _ = run(capsys, "analyze", "--config", str(cfg))
    assert code == 0 and len(json.loads(out)["sequence"]["E"]) == 3
    code, out, _ = run(capsys, "analyze", "--config", str(cfg), "--depth", "5")
    assert len(json.loads(out)["sequence"]["E"]) == 5


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text('{"depht": 3}')
    code, _, err = run(capsys, "analyze", "--config", str(cfg), "--potential", GAUSS)
    assert code == 2 and "depht" in err


def test_json_output_is_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert main(["bound", "--potential", QUARTIC_1_10, "--f", '["1","0","-1","1"]', "--depth", "3",
                     "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert json.loads(json.dumps(data)) == data


def test_verify_paper_subset(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "gaussian")
    data = json.loads(out)
    assert code == 0 and data["pass"] is True
    assert [c["name"] for c in data["claims"]] == ["gaussian-sequence", "gaussian-remainder"]


def test_verify_paper_mutation_fails(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "gaussian-sequence", "--mutate-A", "2,2,-1,5",
                       "--output", "table")
    assert code == 1 and "FAIL" in out


def test_verify_paper_unknown_filter(capsys):
    code, _, _ = run(capsys, "verify-paper", "--only", "nonexistent")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "blrefine", "analyze", "--potential", GAUSS, "--depth", "2",
                           "--output", "csv"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,E_n,positive,witness"
