import csv
import json
import subprocess
import sys

import pytest

from smoothsat.bench.toys import BRANCH_CHAIN
from smoothsat.cli import duration, run_cli

INFEASIBLE = "(real x)\n(assert (>= x 0))\n(assert (>= (- (- x) 1) 0))\n"


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.reas"
    path.write_text(BRANCH_CHAIN)
    return path


def test_thermostat_report_and_trajectory(tmp_path, capsys):
    report, traj = tmp_path / "r.json", tmp_path / "t.csv"
    code = run_cli(["solve", "--bench", "thermostat", "--steps", "50", "--eta", "5", "--seed", "7",
                    "--report", str(report), "--traj", str(traj)])
    assert code == 0
    data = json.loads(report.read_text())
    assert json.loads(capsys.readouterr().out) == data
    assert data["status"] == "SAT" and data["verified"] and data["simulation_ok"]
    assert set(data["stats"]) == {"numeric_calls", "restarts", "wall_ms"}
    assert set(data["assignment"]["reals"]) == {"t_on", "t_off"}
    with open(traj, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "temperature", "timer", "mode"]
    assert len(rows) == 52
    assert all(18.0 <= float(r[1]) <= 20.0 for r in rows[1:])


def test_file_input(chain_file, capsys):
    assert run_cli(["solve", str(chain_file), "--seed", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert 4.0 < data["assignment"]["reals"]["x1"] <= 5.0


def test_infeasible_file_fails_or_times_out(tmp_path, capsys):
    path = tmp_path / "bad.reas"
    path.write_text(INFEASIBLE)
    assert run_cli(["solve", str(path), "--timeout", "2s"]) in (1, 2)
    capsys.readouterr()
    assert run_cli(["solve", str(path), "--restart-limit", "2"]) == 1
    assert json.loads(capsys.readouterr().out)["status"] in ("UNSAT", "SOFT_UNSAT_EXHAUSTED")


def test_baseline_counts(capsys):
    code = run_cli(["solve", "--bench", "thermostat", "--baseline-smoothing", "--restarts", "5",
                    "--seed", "3"])
    data = json.loads(capsys.readouterr().out)
    base = data["baseline"]
    assert base["trials"] <= 5 and 0 <= base["correct"] <= base["found"] <= base["trials"]
    assert code == (0 if base["correct"] else 1)


def test_trace_file(chain_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    run_cli(["solve", str(chain_file), "--trace", str(trace)])
    recs = [json.loads(line) for line in trace.read_text().splitlines()]
    assert recs and {"beta", "iteration", "merit", "residual", "step"} == set(recs[0])


@pytest.mark.parametrize("argv", [
    [],
    ["solve"],
    ["solve", "--bench", "parking"],
    ["solve", "--bench", "pointcar", "--steps", "0"],
    ["solve", "--bench", "pointcar", "--timeout", "soon"],
    ["solve", "--bench", "pointcar", "--beta-schedule", "5,1"],
    ["solve", "missing-file.reas"],
])
def test_usage_errors(argv, capsys):
    assert run_cli(argv) == 64
    assert capsys.readouterr().err


def test_parse_error_is_usage_error(tmp_path, capsys):
    path = tmp_path / "broken.reas"
    path.write_text("(real x)\n(assert (>= x 0)")
    assert run_cli(["solve", str(path)]) == 64
    assert "broken.reas" in capsys.readouterr().err


def test_duration_units():
    assert duration("90") == 90.0
    assert duration("10s") == 10.0
    assert duration("5m") == 300.0
    assert duration("1.5h") == 5400.0


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "smoothsat.cli", "solve", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "--baseline-smoothing" in out.stdout
