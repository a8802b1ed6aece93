import json

import numpy as np
import pytest

from tdcr_sim.cli import main
from tdcr_sim.io import read_shapes, read_trace


@pytest.fixture(autouse=True)
def fast_profile(monkeypatch):
    monkeypatch.setenv("COSSERAT_PROFILE", "fast")


def write_cfg(path, **over):
    cfg = {"controller": {"kind": "backstepping"}, "scenario": {"kind": "nominal"}, "horizon": 25}
    cfg.update(over)
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_writes_trace_and_summary(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--config", "nominal_backstepping", "--horizon", "40", "--out", str(out)]) == 0
    trace = read_trace(out / "trace.csv")
    assert len(trace) == 40
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["controller"]["kind"] == "backstepping"
    assert summary["config"]["discretization"]["nodes"] == 40
    assert set(summary["metrics"]) >= {"tpl_mm", "settling_iterations", "overshoot_percent", "rise_iterations",
                                       "steady_state_error_mm"}
    assert "final tip" in capsys.readouterr().out


def test_simulate_deterministic(tmp_path):
    cfg = write_cfg(tmp_path / "c.json")
    for d in ("a", "b"):
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_summary_reproduces_run(tmp_path):
    # the embedded config alone regenerates the trace
    assert main(["simulate", "--config", write_cfg(tmp_path / "c.json"), "--out", str(tmp_path / "a")]) == 0
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    (tmp_path / "echo.json").write_text(json.dumps(summary["config"]))
    assert main(["simulate", "--config", str(tmp_path / "echo.json"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()


def test_missing_key_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenario": {"kind": "nominal"}}))
    assert main(["simulate", "--config", str(bad)]) == 2
    assert "controller.kind" in capsys.readouterr().err


def test_dry_run(tmp_path, capsys):
    assert main(["simulate", "--config", "nominal_smc", "--dry-run", "--out", str(tmp_path / "x")]) == 0
    resolved = json.loads(capsys.readouterr().out)
    assert resolved["controller"]["kind"] == "smc"
    assert not (tmp_path / "x").exists()


def test_solver_failure_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.json", rod={"gravity": [0.0, 0.0, 0.0]})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "r")]) == 3
    assert "iteration 1" in capsys.readouterr().err


def test_validate(tmp_path, capsys):
    assert main(["validate", "--config", "nominal_backstepping", "--config", "weight20_smc"]) == 0
    assert capsys.readouterr().out.count("ok") == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"controller": {"kind": "smc"}, "scenario": {"kind": "nominal"}, "extra": 1}))
    assert main(["validate", "--config", str(bad)]) == 2


def test_compare_table(tmp_path, capsys):
    a = write_cfg(tmp_path / "a.json", name="bs")
    b = write_cfg(tmp_path / "b.json", name="smc", controller={"kind": "smc"})
    assert main(["compare", "--config", a, "--config", b, "--out", str(tmp_path / "cmp")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6 and "bs" in lines[0] and "smc" in lines[0]
    data = json.loads((tmp_path / "cmp" / "compare.json").read_text())
    assert set(data) == {"bs", "smc"}
    assert (tmp_path / "cmp" / "bs" / "trace.csv").exists()


def test_compare_identical_configs(tmp_path, capsys):
    a = write_cfg(tmp_path / "a.json")
    assert main(["compare", "--config", a, "--config", a, "--out", str(tmp_path / "cmp")]) == 0
    data = list(json.loads((tmp_path / "cmp" / "compare.json").read_text()).values())
    assert data[0] == data[1]


def test_compare_mismatched_scenarios(tmp_path, capsys):
    a = write_cfg(tmp_path / "a.json")
    b = write_cfg(tmp_path / "b.json", scenario={"kind": "disturbance"})
    assert main(["compare", "--config", a, "--config", b]) == 2
    assert "scenario" in capsys.readouterr().err


def test_plot_overlay(tmp_path):
    for d, kind in (("bs", "backstepping"), ("smc", "smc")):
        cfg = write_cfg(tmp_path / f"{d}.json", controller={"kind": kind})
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    out = tmp_path / "plots"
    assert main(["plot", str(tmp_path / "bs" / "trace.csv"), str(tmp_path / "smc" / "trace.csv"),
                 "--out", str(out)]) == 0
    svgs = sorted(p.name for p in out.glob("*.svg"))
    assert svgs == ["displacement.svg", "error.svg", "tip_x.svg", "tip_z.svg"]
    for p in out.glob("*.svg"):
        text = p.read_text()
        assert ">bs<" in text and ">smc<" in text


def test_plot_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["plot", str(empty), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("iteration,t_s,tip_x_mm,tip_y_mm,tip_z_mm,tension_N,displacement_mm,error_mm,lyapunov,"
                   "shoot_iters,shoot_residual\n0,0,1,2\n")
    assert main(["plot", str(bad), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_rodshape(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.json", horizon=12)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "r"), "--store-shapes"]) == 0
    assert len(read_shapes(tmp_path / "r" / "shapes.csv")) == 12
    assert main(["rodshape", str(tmp_path / "r"), "--every", "5"]) == 0
    assert "(4 shapes)" in capsys.readouterr().out
    assert main(["rodshape", str(tmp_path / "r"), "--every", "50", "--out", str(tmp_path / "one.svg")]) == 0
    assert "(1 shapes)" in capsys.readouterr().out and (tmp_path / "one.svg").exists()


def test_rodshape_without_shapes(tmp_path, capsys):
    assert main(["simulate", "--config", write_cfg(tmp_path / "c.json", horizon=3), "--out", str(tmp_path / "r")]) == 0
    assert main(["rodshape", str(tmp_path / "r")]) == 2
    assert "--store-shapes" in capsys.readouterr().err


def test_straight_rod_shapes_on_axis(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", controller={"kind": "zero"}, rod={"gravity": [0.0, 0.0, 0.0]}, horizon=4)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "r"), "--store-shapes"]) == 0
    for P in read_shapes(tmp_path / "r" / "shapes.csv"):
        np.testing.assert_allclose(P[:, :2], 0.0, atol=1e-12)
        np.testing.assert_allclose(P[:, 2], np.linspace(0, 500, len(P)), atol=1e-9)
