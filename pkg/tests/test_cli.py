import pytest

from firesim.cli import EXIT_CODES, main


def test_scenario_list_and_describe(capsys):
    assert main(["scenario", "list"]) == 0
    out = capsys.readouterr().out
    assert "caseA-6" in out and "heterogeneous-2d" in out
    assert main(["scenario", "describe", "caseC-5"]) == 0
    out = capsys.readouterr().out
    assert "vx = 0.08" in out and "scenario = caseC-5" in out


def test_unknown_scenario_is_config_error(capsys):
    assert main(["scenario", "describe", "caseQ-1"]) == EXIT_CODES["config-error"]
    assert capsys.readouterr().err.startswith("error: config-error:")


def test_bad_override_names_key(tmp_path, capsys):
    code = main(["run", "caseA-6", "--out", str(tmp_path / "x"), "--set", "T_pc=200"])
    assert code == EXIT_CODES["config-error"]
    assert "T_pc" in capsys.readouterr().err


def test_missing_config_is_io_error(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "x")])
    assert code == EXIT_CODES["io-error"]
    assert "error: io-error:" in capsys.readouterr().err


def test_run_then_analyze(tmp_path, capsys):
    out = tmp_path / "a4"
    assert main(["run", "caseA-4", "--out", str(out), "--set", "nx=250"]) == 0
    assert (out / "manifest.txt").exists() and (out / "snapshots" / "index.csv").exists()
    capsys.readouterr()
    assert main(["analyze", str(out)]) == 0
    text = capsys.readouterr().out
    assert "front right" in text and "front left" in text and "linearised speed" in text


def test_analyze_closed_forms(capsys):
    assert main(["analyze"]) == 0
    text = capsys.readouterr().out
    assert "c* = 0.189389" in text and "c_sup = 0.298059" in text and "0.16389" in text
    assert main(["analyze", "--Y", "0.01"]) == 0
    assert "no propagation" in capsys.readouterr().out


def test_lumped_to_file(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    assert main(["lumped", "--dt", "0.5", "--t-final", "10", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "t,T,Y" and len(lines) == 22
    assert "final T=" in capsys.readouterr().err


def test_solver_failure_exit_code(tmp_path, monkeypatch, capsys):
    import numpy as np

    import firesim.solver as solver
    from firesim.grid import State

    def broken(state, dt, *args, **kw):
        return State(state.T * np.nan, state.Y, state.t + dt, state.grid)

    monkeypatch.setattr(solver, "strang_step", broken)
    code = main(["run", "caseA-6", "--out", str(tmp_path / "f"), "--set", "nx=100"])
    assert code == EXIT_CODES["solver-error"]
    assert "last valid snapshot kept" in capsys.readouterr().err
    assert (tmp_path / "f" / "snapshots" / "snap_0000.csv").exists()


def test_verify_command(capsys):
    assert main(["verify", "advdiff"]) == 0
    assert "[PASS] advdiff" in capsys.readouterr().out


def test_no_command_exits():
    with pytest.raises(SystemExit):
        main([])
