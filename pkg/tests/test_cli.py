import numpy as np

from utcontrol.cli import EXIT_ASSERT, EXIT_CONFIG, EXIT_OK, main
from utcontrol.harness import read_trace_csv


def write_cfg(tmp_path, body, name="case.cfg"):
    path = tmp_path / name
    path.write_text(body)
    return path


QUICK = """
scenario.name = quick
scenario.duration = 0.8
utc.policy = pi_feedforward
"""


def test_run_success(tmp_path, capsys):
    cfg = write_cfg(tmp_path, QUICK)
    code = main(["run", str(cfg), "--out-dir", str(tmp_path / "out")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "rms_error" in out
    assert (tmp_path / "out" / "quick_trace.csv").exists()


def test_run_duration_override(tmp_path):
    cfg = write_cfg(tmp_path, QUICK)
    code = main(["run", str(cfg), "--out-dir", str(tmp_path / "out"), "--duration", "0.3"])
    assert code == EXIT_OK
    trace = read_trace_csv(tmp_path / "out" / "quick_trace.csv")
    assert trace["t"].shape[0] == int(np.floor(0.3 / 0.0042)) + 1


def test_run_config_error_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "utc.nonsense = 1")
    code = main(["run", str(cfg)])
    assert code == EXIT_CONFIG
    assert "unknown config key" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["run", str(tmp_path / "ghost.cfg")]) == EXIT_CONFIG


def test_run_assert_metrics_failure(tmp_path, capsys):
    cfg = write_cfg(tmp_path, QUICK + "assert.rms_error_max = 1e-12\n")
    code = main(["run", str(cfg), "--out-dir", str(tmp_path / "out"), "--assert-metrics"])
    assert code == EXIT_ASSERT
    assert "assertion failed" in capsys.readouterr().err


def test_run_seedless_check(tmp_path, capsys):
    cfg = write_cfg(tmp_path, QUICK)
    code = main(["run", str(cfg), "--out-dir", str(tmp_path / "out"), "--seedless-check"])
    assert code == EXIT_OK
    assert "bit-identical" in capsys.readouterr().out


def test_compare(tmp_path, capsys):
    a = write_cfg(tmp_path, QUICK, "a.cfg")
    b = write_cfg(tmp_path, "scenario.controller = baseline_pose\nscenario.duration = 0.8\n", "b.cfg")
    code = main(["compare", str(a), str(b), "--out-dir", str(tmp_path / "out"), "--duration", "0.5"])
    assert code == EXIT_OK
    assert (tmp_path / "out" / "comparison.csv").exists()
    assert "rms_error" in capsys.readouterr().out


def test_estimate_pipeline(tmp_path, config_dir, capsys):
    run_cfg = write_cfg(tmp_path, QUICK)
    out_dir = tmp_path / "out"
    assert main(["run", str(run_cfg), "--out-dir", str(out_dir)]) == EXIT_OK
    est_cfg = config_dir / "estimate_fast_turn.cfg"
    code = main([
        "estimate", str(out_dir / "quick_trajectory.csv"), str(est_cfg),
        "--out-dir", str(out_dir),
    ])
    assert code == EXIT_OK
    est_path = out_dir / "estimate_fast_turn_estimates.csv"
    assert est_path.exists()
    header = est_path.read_text().splitlines()[0]
    assert header == "k,t,u_cmdamp,u_kright,u_kleft,u_alpha"


def test_estimate_too_short_is_config_error(tmp_path, config_dir):
    traj = tmp_path / "short.csv"
    traj.write_text("t,y,x0,x1,x2\n0,0,0,0,0\n0.0042,0,0,0,0\n")
    code = main(["estimate", str(traj), str(config_dir / "estimate_fast_turn.cfg"),
                 "--out-dir", str(tmp_path / "out")])
    assert code == EXIT_CONFIG


def test_version_info(capsys):
    assert main(["--version-info"]) == EXIT_OK
    assert "backend" in capsys.readouterr().out


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_CONFIG
