import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from iwdsched.cli import main
from iwdsched.evaluator import DeadlineSet
from iwdsched.formats import save_workflow
from iwdsched.iwd import IwdParams
from iwdsched.workflow import make_workflow

DOCS = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def test_schedule_smoke(tmp_path):
    assert main(["schedule", "--workflow", "diamond", "--interval", "4", "--seed", "0", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    jsonschema.validate(doc, json.loads((DOCS / "report.v1.schema.json").read_text()))
    assert doc["feasible"] and doc["interval"] == 4
    assert doc["total_cost"] > 0 and len(doc["placements"]) == 4
    trace = list(csv.reader(io.StringIO((tmp_path / "convergence.csv").read_text())))
    assert trace[0] == json.loads((DOCS / "csv.json").read_text())["trace"]
    assert len(trace) == 21


def test_schedule_infeasible_exit_2(tmp_path, capsys):
    assert main(["schedule", "--workflow", "diamond", "--deadline-s", "0", "--out", str(tmp_path)]) == 2
    assert "no feasible schedule" in capsys.readouterr().err
    assert json.loads((tmp_path / "report.json").read_text())["feasible"] is False


def test_schedule_missing_file_exit_1(tmp_path, capsys):
    assert main(["schedule", "--workflow", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1
    assert "not found" in capsys.readouterr().err


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["schedule", "--interval", "9", "--workflow", "diamond"])
    assert exc.value.code == 1


def test_iwd_overrides_and_greedy(tmp_path):
    rc = main(["schedule", "--workflow", "diamond", "--deadline-s", "5000", "--iwd.max_iterations", "3",
               "--iwd.rho_n", "0.5", "--out", str(tmp_path)])
    assert rc == 0
    assert len((tmp_path / "convergence.csv").read_text().splitlines()) == 4
    assert main(["schedule", "--workflow", "diamond", "--deadline-s", "5000", "--iwd.rho_n", "2",
                 "--out", str(tmp_path)]) == 1
    assert main(["schedule", "--workflow", "diamond", "--deadline-s", "5000", "--scheduler", "greedy",
                 "--out", str(tmp_path / "g")]) == 0
    assert not (tmp_path / "g" / "convergence.csv").exists()


def test_schedule_oracle_small(tmp_path):
    assert main(["schedule", "--workflow", "diamond", "--deadline-s", "5000", "--scheduler", "oracle",
                 "--iwd.pool_size", "3", "--out", str(tmp_path)]) == 0
    # 18 nodes over 20 tasks is far past the enumeration limit
    assert main(["schedule", "--workflow", "montage-small", "--deadline-s", "5000", "--scheduler", "oracle",
                 "--out", str(tmp_path)]) == 1


def test_deadlines_json(capsys):
    assert main(["deadlines", "--workflow", "diamond", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    ds = DeadlineSet.from_bounds(doc["fastest_s"], doc["slowest_s"])
    assert doc["deadlines_s"] == pytest.approx(list(ds.deadlines), abs=1e-6)


def test_deadlines_text_single_type(tmp_path, capsys):
    prof = tmp_path / "p.json"
    prof.write_text(json.dumps({"format": "iwdsched.profile", "version": 1,
                                "catalog": [{"name": "x", "ecu": 1.5, "cost_per_period": 0.1}]}))
    assert main(["deadlines", "--workflow", "diamond", "--profile", str(prof)]) == 0
    lines = [l.split()[1] for l in capsys.readouterr().out.splitlines() if l.startswith("deadline")]
    assert len(lines) == 4 and len(set(lines)) == 1


def test_deadlines_bad_profile(tmp_path):
    prof = tmp_path / "p.json"
    prof.write_text("{")
    assert main(["deadlines", "--workflow", "diamond", "--profile", str(prof)]) == 1


def test_deadlines_fixture_100_600(tmp_path, capsys):
    # two types with 6x speed ratio; one task of 0 transfer: slowest - fastest = 500 s
    prof = tmp_path / "p.json"
    prof.write_text(json.dumps({"format": "iwdsched.profile", "version": 1, "boot_time_s": 0,
                                "catalog": [{"name": "slow", "ecu": 1, "cost_per_period": 0.1},
                                            {"name": "fast", "ecu": 6, "cost_per_period": 0.6}]}))
    wf = tmp_path / "w.json"
    save_workflow(make_workflow([("A", 600_000)], name="fixture"), wf)
    assert main(["deadlines", "--workflow", str(wf), "--profile", str(prof), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["fastest_s"], doc["slowest_s"]) == (100.0, 600.0)
    assert doc["deadlines_s"] == [200.0, 300.0, 400.0, 500.0]


def test_bench_small_grid(tmp_path):
    out = tmp_path / "b.csv"
    args = ["bench", "--workflows", "diamond", "nope", "--intervals", "1", "4", "--trials", "2", "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == json.loads((DOCS / "csv.json").read_text())["bench"]
    assert len(rows) == 8
    assert [(r["workflow"], r["interval"], r["scheduler"]) for r in rows] == sorted(
        (r["workflow"], r["interval"], r["scheduler"]) for r in rows)
    ok = [r for r in rows if r["workflow"] == "diamond"]
    assert all(r["error"] == "" and 0 <= float(r["met_pct"]) <= 100 for r in ok)
    assert all(r["error"] for r in rows if r["workflow"] == "nope")


def test_convergence_cli(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["convergence", "--workflow", "cybershake-small", "--interval", "4", "--seeds", "1",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == IwdParams().max_iterations
    costs = [float(r["mean_best_cost"]) for r in rows]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    # one seed: the curve is that run's trace
    assert main(["schedule", "--workflow", "cybershake-small", "--interval", "4", "--out", str(tmp_path)]) in (0, 2)
    trace = list(csv.DictReader((tmp_path / "convergence.csv").open()))
    assert [r["best_cost"] for r in trace] == [r["mean_best_cost"] for r in rows]
