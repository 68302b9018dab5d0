"""The batch front door: schema, exit codes, determinism, golden jobs."""

import copy
import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from hoch import cli

JOBS = Path(__file__).resolve().parent.parent / "jobs"

BASE = {
    "schema": 1,
    "task": "homology",
    "algebra": {"name": "truncated-polynomial", "truncation": 2},
    "space": {"name": "circle"},
    "window": [-4, 0],
    "output": "json",
}


def run_spec(raw):
    spec = cli.load_jobspec(copy.deepcopy(raw))
    return cli.run_job(spec)


def test_schema_version_required():
    bad = dict(BASE)
    bad.pop("schema")
    with pytest.raises(cli.SchemaError):
        cli.load_jobspec(bad)


def test_unknown_field_rejected():
    bad = dict(BASE)
    bad["surprise"] = 1
    with pytest.raises(cli.SchemaError, match="unknown fields"):
        cli.load_jobspec(bad)


def test_bad_window_rejected():
    bad = dict(BASE)
    bad["window"] = [0, -4]
    with pytest.raises(cli.SchemaError):
        cli.load_jobspec(bad)
    bad["window"] = "0..4"
    with pytest.raises(cli.SchemaError):
        cli.load_jobspec(bad)


def test_unknown_task_rejected():
    bad = dict(BASE)
    bad["task"] = "frobnicate"
    with pytest.raises(cli.SchemaError):
        cli.load_jobspec(bad)


def test_run_basic_homology_report():
    report = run_spec(BASE)
    assert report["verdict"] == "pass"
    per_degree = {}
    for e in report["betti"]:
        per_degree[e["degree"]] = per_degree.get(e["degree"], 0) + e["dim"]
    assert per_degree == {0: 2, -1: 1, -2: 1, -3: 1, -4: 1}
    assert report["max_block"] > 0
    assert "wall_time_s" in report and "timestamp" in report


def test_expectation_failure_gives_fail_verdict():
    raw = dict(BASE)
    raw["expect_per_degree"] = {"0": 99}
    report = run_spec(raw)
    assert report["verdict"] == "fail"


def test_determinism_modulo_timestamp():
    a = run_spec(BASE)
    b = run_spec(BASE)
    for volatile in ("timestamp", "wall_time_s"):
        a.pop(volatile), b.pop(volatile)
    assert json.dumps(a, sort_keys=True, default=str) == json.dumps(
        b, sort_keys=True, default=str
    )


def test_inline_algebra_presentation():
    raw = dict(BASE)
    raw["algebra"] = {
        "label": "k[x]/x^2 inline",
        "basis": [
            {"label": "1", "degree": 0, "weight": 0},
            {"label": "x", "degree": 0, "weight": 1},
        ],
        "unit": "1",
        "mult": [
            ["1", "1", {"1": "1"}],
            ["1", "x", {"x": "1"}],
            ["x", "1", {"x": "1"}],
            ["x", "x", {}],
        ],
        "augmentation": {"1": "1"},
        "weight_graded": True,
    }
    report = run_spec(raw)
    per_degree = {}
    for e in report["betti"]:
        per_degree[e["degree"]] = per_degree.get(e["degree"], 0) + e["dim"]
    assert per_degree == {0: 2, -1: 1, -2: 1, -3: 1, -4: 1}


def test_bad_inline_presentation_is_schema_error():
    raw = dict(BASE)
    raw["algebra"] = {
        "basis": [{"label": "1", "degree": 0}],
        "unit": "1",
        "mult": [["1", "1", {"1": "2"}]],  # broken unit law
    }
    with pytest.raises(cli.SchemaError):
        run_spec(raw)


def test_fp_coefficients():
    raw = dict(BASE)
    raw["coefficients"] = "Fp:5"
    report = run_spec(raw)
    assert report["verdict"] == "pass"


def test_cap_infeasible(tmp_path):
    raw = {
        "schema": 1,
        "task": "homology",
        "algebra": {"name": "polynomial"},
        "space": {"name": "torus"},
        "window": [-4, 0],
        "weights": [2],
        "cap": 5,
    }
    spec = cli.load_jobspec(copy.deepcopy(raw))
    with pytest.raises(cli.InfeasibleError):
        cli.run_job(spec)
    path = tmp_path / "job.json"
    path.write_text(json.dumps(raw))
    assert cli.main(["run", str(path)]) == 3


def test_explain_reports_builder_dims(tmp_path, capsys):
    raw = dict(BASE)
    raw["space"] = {"name": "circle", "level": 6}
    raw["window"] = [-4, 0]
    spec = cli.load_jobspec(raw)
    report = cli.explain_job(spec)
    # normalized circle dims for a dim-2 algebra: 2 * 1 per level
    assert report["level_dims"][:4] == [2, 2, 2, 2]
    assert report["truncation_level"] == 5
    # explain twice: side-effect free
    assert cli.explain_job(spec)["level_dims"] == report["level_dims"]


def test_explain_infeasible():
    raw = dict(BASE)
    raw["cap"] = 1
    spec = cli.load_jobspec(raw)
    with pytest.raises(cli.InfeasibleError):
        cli.explain_job(spec)


def test_malformed_json_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["run", str(path)]) == 2


def test_unknown_field_exit_code(tmp_path):
    raw = dict(BASE)
    raw["mystery"] = True
    path = tmp_path / "job.json"
    path.write_text(json.dumps(raw))
    assert cli.main(["run", str(path)]) == 2


def test_flag_overrides(tmp_path, capsys):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(BASE))
    code = cli.main(
        ["run", str(path), "--window=-2..0", "--format", "json",
         "--threads", "2", "--coefficients", "Q"]
    )
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["job"]["window"] == [-2, 0]


def test_cli_subprocess_smoke(tmp_path):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(BASE))
    proc = subprocess.run(
        [sys.executable, "-m", "hoch.cli", "run", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert '"verdict": "pass"' in proc.stdout


@pytest.mark.parametrize(
    "job",
    sorted(
        p.name
        for p in JOBS.glob("*.json")
        if p.name.startswith(("criterion", "extra"))
    ),
)
def test_golden_jobs_pass(job, capsys):
    assert cli.main(["run", str(JOBS / job), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "pass"


def test_every_acceptance_scenario_has_a_golden_file():
    names = {p.name for p in JOBS.glob("criterion*.json")}
    covered = {re.match(r"criterion(\d+)", n).group(1) for n in names}
    assert covered == {f"{i:02d}" for i in range(1, 12)}


def test_failing_expectation_exit_code(tmp_path):
    raw = dict(BASE)
    raw["expect_per_degree"] = {"0": 42}
    path = tmp_path / "job.json"
    path.write_text(json.dumps(raw))
    assert cli.main(["run", str(path)]) == 1


def test_enumeration_cap_fails_fast(tmp_path):
    # a job whose level bases would explode must exit infeasible quickly
    raw = {
        "schema": 1,
        "task": "homology",
        "algebra": {"name": "truncated-polynomial", "truncation": 3},
        "space": {"name": "sphere-small", "d": 2, "level": 7},
        "window": [-6, 0],
        "cap": 2000,
    }
    path = tmp_path / "huge.json"
    path.write_text(json.dumps(raw))
    assert cli.main(["run", str(path)]) == 3
