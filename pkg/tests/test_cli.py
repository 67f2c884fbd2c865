import csv
import json
import subprocess
import sys

import pytest

from ccopt.cli import UsageError, execute, main, parse_args
from ccopt.trace import TRACE_COLUMNS


def test_defaults_applied():
    req = parse_args(["--problem", "rosenbrock_l1", "--method", "wolfe"])
    assert req.problem == "rosenbrock_l1" and req.method == "wolfe"
    assert req.config.sigma1 == 1e-4 and req.config.sigma2 == 0.9 and req.config.stat_every == 10
    assert req.format == "csv" and req.trace_path is None


def test_sigma_constraint_error():
    with pytest.raises(UsageError, match="--sigma2 must exceed --sigma1"):
        parse_args(["--sigma1", "0.9", "--sigma2", "0.5", "--method", "wolfe"])


def test_delta0_override():
    req = parse_args(["--problem", "fit", "--data", "pts.csv", "--method", "trust-region", "--delta0", "2"])
    assert req.config.delta0 == 2.0 and req.data == "pts.csv" and req.method == "trust-region"


@pytest.mark.parametrize(
    "argv",
    [
        ["--bogus"],
        ["--method", "newton"],
        ["--theta", "1.5", "--method", "backtracking"],
        ["--gamma1", "0.9", "--method", "trust-region"],
        ["--x0", "1,abc"],
        ["--stat-every", "0"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)
    assert main(argv) == 1


def test_json_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"problem": "sincos_l1", "method": "trust-region", "delta0": 0.5, "max-iters": 7}))
    req = parse_args(["--problem", str(cfg), "--max-iters", "9"])
    assert req.problem == "sincos_l1" and req.method == "trust-region"
    assert req.config.delta0 == 0.5 and req.config.max_iters == 9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"wat": 1}))
    with pytest.raises(UsageError):
        parse_args(["--problem", str(bad)])


def test_exit_codes(tmp_path, capsys):
    assert main(["--problem", "rosenbrock_l1", "--method", "trust-region"]) == 0
    out = capsys.readouterr().out
    assert "Stationary" in out and "final f" in out and "iterations" in out and "stationarity" in out
    assert main(["--problem", "unbounded_linear", "--method", "wolfe"]) == 2
    assert main(["--problem", "rosenbrock_l1", "--method", "wolfe", "--max-iters", "1"]) == 3
    assert main(["--problem", "rosenbrock_l1", "--trace", str(tmp_path / "no" / "dir" / "t.csv")]) == 1
    assert main(["--problem", "nope"]) == 1


def test_csv_trace_columns(tmp_path):
    path = tmp_path / "t.csv"
    assert main(["--problem", "rosenbrock_l1", "--method", "backtracking", "--trace", str(path)]) == 0
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert all(r[TRACE_COLUMNS.index("ratio")] == "" for r in rows[1:])
    assert rows[-1][TRACE_COLUMNS.index("stationarity")] != ""
    assert [int(r[0]) for r in rows[1:]] == list(range(len(rows) - 1))


def test_json_trace(tmp_path):
    path = tmp_path / "t.json"
    assert main(["--problem", "sincos_l1", "--method", "trust-region", "--format", "json", "--trace", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert set(doc["records"][0]) == set(TRACE_COLUMNS)
    assert doc["summary"]["reason"] == "Stationary"
    assert doc["records"][0]["ratio"] is not None


def test_fit_problem_from_csv(tmp_path):
    data = tmp_path / "pts.csv"
    data.write_text("t,y\n" + "".join(f"{t / 10},{2.0 * 2.718281828 ** (-1.3 * t / 10)}\n" for t in range(20)))
    req = parse_args(["--problem", "fit", "--data", str(data), "--method", "trust-region", "--delta0", "2"])
    assert execute(req) == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("0,abc\n")
    assert main(["--problem", "fit", "--data", str(bad)]) == 1


def test_log_level_env(monkeypatch, capsys):
    monkeypatch.setenv("CC_OPT_LOG", "debug")
    assert main(["--problem", "rosenbrock_l1", "--method", "wolfe", "--max-iters", "2"]) == 3


def test_module_entry_point(tmp_path):
    path = tmp_path / "t.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "ccopt", "--problem", "smooth_quadratic", "--trace", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert path.exists()


def test_determinism(tmp_path):
    for fmt in ("csv", "json"):
        a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
        for p in (a, b):
            main(["--problem", "l1_reg_exp_fit", "--method", "wolfe", "--format", fmt, "--trace", str(p), "--seed", "3"])
        assert a.read_bytes() == b.read_bytes()
