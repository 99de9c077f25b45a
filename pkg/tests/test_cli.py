import json
import subprocess
import sys

import pytest

from oracles import plain_terms
from zeckendorf_intervals import __version__
from zeckendorf_intervals.cli import main
from zeckendorf_intervals.plrs_core import SequenceCache

FIB = SequenceCache([1, 1])


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def csv_body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_seq_fibonacci(capsys):
    code, out, _ = run(capsys, "seq", "--coeffs", "1,1", "--n", 10)
    assert code == 0
    assert out.startswith(f"# zeckendorf-lab {__version__} config=")
    assert csv_body(out)[-1] == "10,89"


def test_seq_231(capsys):
    code, out, _ = run(capsys, "seq", "--coeffs", "2,3,1", "--n", 5)
    assert code == 0 and csv_body(out)[-1] == "5,93"


def test_seq_json(capsys):
    code, out, _ = run(capsys, "seq", "--coeffs", "1,1", "--n", 100, "--format", "json")
    obj = json.loads(out)
    assert obj["version"] == __version__ and obj["config"]["seed"] == 0
    assert obj["terms"][-1] == [100, str(plain_terms((1, 1), 100)[-1])]


def test_seq_invalid(capsys):
    code, _, err = run(capsys, "seq", "--coeffs", "0,1", "--n", 5)
    assert code == 2 and "NonPositiveLeading" in err


def test_decompose_100(capsys):
    code, out, _ = run(capsys, "decompose", "--coeffs", "1,1", 100)
    assert code == 0
    assert "values: 89+8+3" in out
    assert "summands: s=3" in out
    assert "gaps: (1,4)" in out
    assert "legal: true (greedy)" in out


def test_decompose_184(capsys):
    code, out, _ = run(capsys, "decompose", "--coeffs", "2,3,1", 184)
    assert code == 0
    assert "decomposition: G5+2·G4+3·G3+G1" in out
    assert "(general)" in out


def test_decompose_zero(capsys):
    code, out, _ = run(capsys, "decompose", "--coeffs", "1,1", 0)
    assert code == 0 and "summands: s=0" in out and "gaps: ()" in out


def test_decompose_json_big(capsys):
    N = 10 ** 60 + 7
    code, out, _ = run(capsys, "decompose", "--coeffs", "1,1", N, "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["decomposition"]["value"] == str(N) and obj["legal"]


def test_decompose_budget(capsys):
    code, _, err = run(capsys, "decompose", "--coeffs", "1,1", 10 ** 30, "--max-index", 50)
    assert code == 3 and "BudgetExceeded" in err


def test_decompose_negative(capsys):
    code, _, _ = run(capsys, "decompose", "--coeffs", "1,1", "--", "-5")
    assert code == 2


def test_dist_upto(capsys):
    code, out, _ = run(capsys, "dist", "--coeffs", "1,1", "--upto-index", 5)
    assert code == 0
    assert csv_body(out) == ["count,freq", "0,1", "1,4", "2,3"]


def test_dist_json_ks(capsys):
    code, out, _ = run(capsys, "dist", "--coeffs", "1,1", "--upto-index", 200, "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["total"] == str(FIB.term(200))
    # exact KS at this scale is about 0.0500 for Fibonacci; reported, not forced
    assert 0.04 < obj["ks"] < 0.06


def test_dist_counterexample(capsys):
    code, out, _ = run(capsys, "dist", "--coeffs", "1,1", "--counterexample-n", 16, "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["bimodal"] is True
    assert obj["histogram"] == {"2": "1", "3": "1", "9": "1"}


def test_dist_sampled_threads(capsys):
    args = ["dist", "--coeffs", "1,1", "--lo", 10 ** 30, "--len", 10 ** 20, "--samples", 2000,
            "--seed", 3, "--format", "json"]
    _, one, _ = run(capsys, *args, "--threads", 1)
    _, four, _ = run(capsys, *args, "--threads", 4)
    _, again, _ = run(capsys, *args, "--threads", 1)
    assert one == four == again
    assert json.loads(one)["total"] == "2000"


def test_dist_requires_interval(capsys):
    code, _, _ = run(capsys, "dist", "--coeffs", "1,1")
    assert code == 2


def test_dist_exhaustive_budget(capsys):
    code, _, _ = run(capsys, "dist", "--coeffs", "1,1", "--lo", 0, "--len", 1000,
                     "--mode", "exhaustive", "--budget", 10)
    assert code == 3


def test_subinterval_json(capsys):
    args = ["subinterval", "--coeffs", "1,1", "--n", 30, "--alpha", 12, "--q", 8,
            "--samples", 10, "--seed", 7]
    code, out, _ = run(capsys, *args)
    obj = json.loads(out)
    assert code == 0 and len(obj["reports"]) == 10
    agg = obj["aggregate"]
    assert 0 <= agg["pass_fraction"] <= 1
    for r in obj["reports"]:
        if r["zero_run_found"]:
            assert r["c3_constant"] and 0 <= r["shift_error_max"] < 8
    _, again, _ = run(capsys, *args)
    _, threaded, _ = run(capsys, *args, "--threads", 4)
    assert again == out
    assert json.loads(threaded)["reports"] == obj["reports"]


def test_subinterval_csv(capsys):
    code, out, _ = run(capsys, "subinterval", "--coeffs", "1,1", "--n", 30, "--alpha", 12, "--q", 8,
                       "--samples", 5, "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# zeckendorf-lab")
    assert lines[1].startswith("m,zero_run_found")
    assert len(lines) == 2 + 5 + 1 and lines[-1].startswith("# aggregate")


def test_subinterval_window_too_small(capsys):
    code, out, err = run(capsys, "subinterval", "--coeffs", "1,1", "--n", 40, "--alpha", 20, "--q", 4,
                         "--samples", 5)
    assert code == 0 and "WindowTooSmall" in err
    assert json.loads(out)["aggregate"]["pass_fraction"] == 0


def test_census_csv_and_roots(capsys, tmp_path):
    roots = tmp_path / "roots.json"
    code, out, _ = run(capsys, "census", "--coeffs", "1,1", "--Z", 3, "--n", 60, "--roots-out", roots)
    assert code == 0
    rows = csv_body(out)
    assert rows[0] == "n,H_n,G_n,ratio,tilde" and len(rows) == 61
    ratios = [float(r.split(",")[3]) for r in rows[1:]]
    tail = ratios[30:]
    assert all(b < a for a, b in zip(tail, tail[1:]))
    obj = json.loads(roots.read_text())
    assert obj["roots"]["gap"] > 0 and obj["decay"]["status"] == "PASS"


def test_census_roots_to_stderr(capsys):
    code, _, err = run(capsys, "census", "--coeffs", "1,1", "--Z", 3, "--n", 30)
    assert code == 0 and '"omega_hat"' in err


def test_census_z_too_small(capsys):
    code, _, err = run(capsys, "census", "--coeffs", "1,1", "--Z", 2)
    assert code == 2 and "ZNotGreaterThanL" in err


def test_census_verify(capsys):
    code, _, err = run(capsys, "census", "--coeffs", "3,2,1", "--Z", 4, "--n", 40, "--verify", 14)
    assert code == 0 and "verified n ≤ 14 against brute force: OK" in err


def test_census_json(capsys):
    code, out, _ = run(capsys, "census", "--coeffs", "1,1", "--Z", 3, "--n", 40, "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["table"][5]["H_n"] == "12"


def test_out_file(capsys, tmp_path):
    path = tmp_path / "seq.csv"
    code, out, _ = run(capsys, "seq", "--coeffs", "1,1", "--n", 5, "--out", path)
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[-1] == "5,8"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zeckendorf_intervals", "seq", "--coeffs", "1,1", "--n", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[-1] == "3,3"

