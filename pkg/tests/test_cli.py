import csv
import io
import json
import subprocess
import sys

import pytest

from dronevrp.cli import EXIT_INFEASIBLE, EXIT_INVALID, main

FAST = ["--mu", "0.5", "--rounds", "40"]


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scn.json"
    assert run("generate", "-n", 4, "--seed", 3, "--time-limit", 900, "-o", path)[0] == 0
    return path


def test_generate_many(tmp_path):
    code, text = run("generate", "-n", 3, "--count", 3, "-o", tmp_path / "set")
    assert code == 0
    files = sorted((tmp_path / "set").glob("instance_*.json"))
    assert len(files) == 3 and len(text.splitlines()) == 3
    docs = [json.loads(f.read_text()) for f in files]
    assert docs[0]["locations"] != docs[1]["locations"]


def test_generate_distance_matrix(tmp_path):
    assert run("generate", "-n", 3, "--distances", "-o", tmp_path / "s.json")[0] == 0
    rows = list(csv.reader((tmp_path / "s.distances.csv").open()))
    assert rows[0] == ["from\\to", "0", "1", "2", "3"]
    assert float(rows[1][1]) == 0.0 and len(rows) == 5


def test_generate_is_deterministic(tmp_path):
    run("generate", "--seed", 9, "-o", tmp_path / "a.json")
    run("generate", "--seed", 9, "-o", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_solve(scenario_file, tmp_path):
    runs, trace = tmp_path / "runs.csv", tmp_path / "trace.csv"
    code, text = run("solve", scenario_file, "--runs", 3, "-o", runs, "--trace", trace, *FAST)
    assert code == 0
    assert text.startswith("solution ") and "runs            3" in text
    rows = list(csv.DictReader(runs.open()))
    assert len(rows) == 3 and rows[0]["run"] == "0" and "total_cost" in rows[0]
    assert trace.read_text().splitlines()[0].startswith("phase")


def test_solve_modes(scenario_file):
    assert run("solve", scenario_file, "--no-reuse", *FAST)[0] == 0
    assert run("solve", scenario_file, "--battery-weight", 0.4, "--objective", "time",
               "--budget", 5000, *FAST)[0] == 0


def test_solve_unreachable_limit_reports_infeasible(scenario_file):
    code, text = run("solve", scenario_file, "--time-limit", 1, *FAST)
    assert code == EXIT_INFEASIBLE and "penalized       yes" in text


def test_missing_and_malformed_scenario(tmp_path):
    assert run("solve", tmp_path / "nope.json")[0] == EXIT_INVALID
    bad = tmp_path / "bad.json"
    bad.write_text("{\"format\": 1")
    assert run("solve", bad)[0] == EXIT_INVALID


def test_bad_sa_settings(scenario_file):
    assert run("solve", scenario_file, "--mu", 1.5)[0] == EXIT_INVALID


def test_experiment_and_sweep(tmp_path):
    exp, sw = tmp_path / "exp.csv", tmp_path / "sweep.csv"
    code, text = run("experiment", "-n", 4, "--instances", 2, "--runs", 2, "-o", exp, *FAST)
    assert code == 0 and text.startswith("average min")
    assert len(exp.read_text().splitlines()) == 4
    code, text = run("sweep", "-n", 4, "--instances", 2, "--runs", 2, "--parameter", "time_limit",
                     "--values", 600, 1200, "-o", sw, *FAST)
    assert code == 0 and text.splitlines()[0] == "value,avg_min,avg_mean,avg_std"
    assert len(sw.read_text().splitlines()) == 3


def test_oracle(scenario_file, tmp_path):
    out = tmp_path / "opt.csv"
    code, text = run("oracle", scenario_file, "-o", out)
    assert code == 0 and "optimum" in text
    row = next(csv.DictReader(out.open()))
    assert row["penalized"] == "0" and row["solution"].startswith("0 ")


def test_oracle_too_large(tmp_path):
    path = tmp_path / "big.json"
    run("generate", "-n", 12, "-o", path)
    assert run("oracle", path)[0] == EXIT_INVALID


def test_export_lp(scenario_file, tmp_path):
    lp = tmp_path / "m.lp"
    code, text = run("export-lp", scenario_file, "-o", lp)
    assert code == 0 and "variables" in text
    assert "\nMinimize\n obj: c\n" in lp.read_text()
    assert run("export-lp", scenario_file, "--battery-types", "-o", lp)[0] == EXIT_INVALID


def test_validate(scenario_file, tmp_path):
    code, text = run("validate", scenario_file, "0 1 0 2 0 3 0 4 0")
    assert code == 0 and text.rstrip().endswith("0 violations")
    sol = tmp_path / "sol.txt"
    sol.write_text("[0, 1, 2, 0, 3, 4, 0]\n")
    assert run("validate", scenario_file, sol)[0] in (0, EXIT_INFEASIBLE)
    assert run("validate", scenario_file, "0 1 2 0")[0] == EXIT_INVALID
    assert run("validate", scenario_file, "0 a 0")[0] == EXIT_INVALID


def test_validate_reports_time_limit_rows(scenario_file):
    code, text = run("validate", scenario_file, "0 1 0 2 0 3 0 4 0", "--time-limit", 1)
    assert code == 1 and text.startswith("c7e:")


def test_validate_overloaded_route(tmp_path):
    path = tmp_path / "heavy.json"
    run("generate", "-n", 4, "--demand-range", 2.9, 3.0, "-o", path)
    assert run("validate", path, "0 1 2 0 3 4 0")[0] == EXIT_INFEASIBLE


def test_module_entry_point(scenario_file):
    proc = subprocess.run([sys.executable, "-m", "dronevrp", "validate", str(scenario_file), "0 1 0 2 0 3 0 4 0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "violations" in proc.stdout


def test_no_subcommand():
    with pytest.raises(SystemExit):
        main([])
