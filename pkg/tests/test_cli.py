import json
import shutil
from pathlib import Path

import pytest

import gvfnav
from gvfnav.cli import main

DATA = Path(gvfnav.__file__).parent / "data"


def test_validate_first_experiment_reports_locked_points(tmp_path, capsys):
    rc = main(["validate", "--spline", str(DATA / "first_experiment.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"]
    locked = {(p["segment"], p["index"]): (p["x"], p["y"])
              for p in report["locked_points"]}
    assert locked[(1, 1)][0] == pytest.approx(40.45, abs=0.02)
    assert locked[(1, 1)][1] == pytest.approx(65.78, abs=0.02)
    assert locked[(1, 2)][0] == pytest.approx(-16.64, abs=0.02)
    assert locked[(1, 2)][1] == pytest.approx(65.54, abs=0.02)
    assert len(report["configurable_points"]) == 12
    assert report["joint_defects"] == []


def test_validate_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"degree": 5, "continuity": "C2", "segments": []}')
    rc = main(["validate", "--spline", str(bad)])
    assert rc == 1
    out = json.loads(capsys.readouterr().out)
    assert not out["ok"]
    assert out["errors"]


def test_simulate_deterministic_bytes(tmp_path):
    scenario = tmp_path / "scenario.json"
    cfg = gvfnav.bundled_config("simulation")
    cfg["duration"] = 2.0
    cfg["noise"] = {"kind": "uniform_disk", "bound": 1.0}
    scenario.write_text(json.dumps(cfg))
    rc = main(["simulate", "--scenario", str(scenario), "--out", str(tmp_path / "a")])
    assert rc == 0
    rc = main(["simulate", "--scenario", str(scenario), "--out", str(tmp_path / "b")])
    assert rc == 0
    assert (tmp_path / "a/log.csv").read_bytes() == (tmp_path / "b/log.csv").read_bytes()
    assert (tmp_path / "a/scenario.json").exists()
    rc = main(["simulate", "--scenario", str(scenario), "--seed", "9",
               "--out", str(tmp_path / "c")])
    assert rc == 0
    assert (tmp_path / "a/log.csv").read_bytes() != (tmp_path / "c/log.csv").read_bytes()


def test_analyze_reports_threshold(tmp_path, capsys):
    scenario = tmp_path / "scenario.json"
    cfg = gvfnav.bundled_config("simulation")
    cfg["duration"] = 30.0
    cfg["noise"] = {"kind": "uniform_disk", "bound": 7.6}
    scenario.write_text(json.dumps(cfg))
    assert main(["simulate", "--scenario", str(scenario),
                 "--out", str(tmp_path / "run")]) == 0
    capsys.readouterr()
    rc = main(["analyze", "--log", str(tmp_path / "run/log.csv"),
               "--bound", "7.6", "--out", str(tmp_path / "report")])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["bound"]["threshold"] == pytest.approx(15.2)
    assert (tmp_path / "report/summary.json").exists()
    assert (tmp_path / "report/speed.csv").exists()


def test_analyze_without_sidecar_needs_gains(tmp_path, capsys):
    scenario = tmp_path / "scenario.json"
    cfg = gvfnav.bundled_config("simulation")
    cfg["duration"] = 1.0
    scenario.write_text(json.dumps(cfg))
    assert main(["simulate", "--scenario", str(scenario),
                 "--out", str(tmp_path / "run")]) == 0
    (tmp_path / "run/scenario.json").unlink()
    capsys.readouterr()
    rc = main(["analyze", "--log", str(tmp_path / "run/log.csv"), "--bound", "5.0"])
    assert rc == 1


def test_field_export(tmp_path):
    out = tmp_path / "grid.csv"
    rc = main(["field", "--spline", str(DATA / "first_experiment.json"),
               "--w", "0.5", "--bbox=-20,-20,80,80", "--res", "8",
               "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "x,y,chi_hat_x,chi_hat_y"
    assert len(lines) == 65
    for line in lines[1:]:
        vals = [float(v) for v in line.split(",")]
        assert abs(vals[2] ** 2 + vals[3] ** 2 - 1.0) < 1e-9


def test_replay_rederives_panels(tmp_path):
    scenario = tmp_path / "scenario.json"
    cfg = gvfnav.bundled_config("simulation")
    cfg["duration"] = 2.0
    scenario.write_text(json.dumps(cfg))
    assert main(["simulate", "--scenario", str(scenario),
                 "--out", str(tmp_path / "run")]) == 0
    rc = main(["replay", "--log", str(tmp_path / "run/log.csv"),
               "--out", str(tmp_path / "panels")])
    assert rc == 0
    from gvfnav.analysis import PANELS
    for panel in PANELS:
        assert (tmp_path / "panels" / f"{panel}.csv").exists()
    errors = (tmp_path / "panels/errors.csv").read_text().splitlines()
    assert errors[0] == "t,phi1,phi2,w"
    assert len(errors) == 201


def test_bad_args_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])  # missing required flags
    assert exc.value.code == 2


def test_missing_scenario_file(capsys):
    rc = main(["simulate", "--scenario", "/nonexistent.json", "--out", "/tmp/x"])
    assert rc == 1
    assert not json.loads(capsys.readouterr().out)["ok"]
