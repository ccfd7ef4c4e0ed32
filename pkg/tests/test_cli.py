import json
import os

import pytest

from stokesmem.cli import (
    ACCEPTANCE_THRESHOLDS,
    EXIT_CONFIG,
    EXIT_INADMISSIBLE,
    EXIT_OK,
    OUTPUT_DIR_ENV,
    RunConfig,
    run_command,
)

FAST = ["--m-min", "24", "--m-max", "28"]


def run(tmp_path, *args):
    out = tmp_path / "out"
    return run_command(["--output-dir", str(out), *args]), out


def test_scan_happy_path(tmp_path, capsys):
    code, out = run(tmp_path, *FAST, "scan")
    assert code == EXIT_OK
    assert (out / "scan.csv").exists()
    assert (out / "summary.json").exists()
    payload = json.loads((out / "summary.json").read_text())
    assert set(payload) >= {"config", "slopes", "thresholds", "verdicts"}
    assert payload["thresholds"] == ACCEPTANCE_THRESHOLDS
    header = (out / "scan.csv").read_text().splitlines()[0]
    assert header == ("M,initial_norm_sq,A1,A2,boundary_weighted,"
                      "boundary_unweighted,quotient")
    assert "no single constant" in capsys.readouterr().out


def test_invalid_field_exits_2(tmp_path, capsys):
    code, _ = run(tmp_path, "--a", "-1", "scan")
    assert code == EXIT_CONFIG
    assert "a" in capsys.readouterr().err


def test_inconsistent_window_exits_2(tmp_path, capsys):
    code, _ = run(tmp_path, "--m-min", "30", "--m-max", "24", "scan")
    assert code == EXIT_CONFIG
    assert "M_min" in capsys.readouterr().err


def test_packet_below_threshold_exits_4(tmp_path, capsys):
    code, _ = run(tmp_path, "--a", "1100", "packet", "--M", "1")
    assert code == EXIT_INADMISSIBLE
    assert "n0=11" in capsys.readouterr().err


def test_packet_export(tmp_path):
    code, out = run(tmp_path, "packet", "--M", "24")
    assert code == EXIT_OK
    lines = (out / "packet_M24.csv").read_text().splitlines()
    assert lines[0] == "M,k,index,beta_k,C1_k,node_k,gamma_k,residual"
    assert len(lines) == 9
    assert lines[1].split(",")[2] == "193"


def test_byte_identical_reruns(tmp_path):
    out = tmp_path / "out"
    assert run_command(["--output-dir", str(out), *FAST, "scan"]) == EXIT_OK
    first_csv = (out / "scan.csv").read_bytes()
    first_json = (out / "summary.json").read_bytes()
    assert run_command(["--output-dir", str(out), *FAST, "scan"]) == EXIT_OK
    assert (out / "scan.csv").read_bytes() == first_csv
    assert (out / "summary.json").read_bytes() == first_json


def test_eigs_exports(tmp_path):
    small = ["--n-max", "30", "--m-max", "2", "--m-min", "1",
             "--gramian-n-max", "16"]
    code, out = run(tmp_path, *small, "eigs3d")
    assert code == EXIT_OK
    lines = (out / "modes3d.csv").read_text().splitlines()
    assert lines[0] == "n,lambda,eps_n,norm_sq,gamma_n"
    assert len(lines) == 31
    code, out = run(tmp_path, *small, "eigs2d")
    assert code == EXIT_OK
    assert (out / "modes2d.csv").read_text().splitlines()[0] == \
        "n,j1n,lambda,norm_sq,gamma_n"


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nM_min = 25\nM_max = 30\ntol.root_abs = 1e-12\n")
    out = tmp_path / "out"
    code = run_command(["--config", str(cfg), "--output-dir", str(out),
                        "--set", "M_max=28", "scan"])
    assert code == EXIT_OK
    payload = json.loads((out / "summary.json").read_text())
    assert payload["config"]["M_min"] == 25
    assert payload["config"]["M_max"] == 28  # --set wins over the file
    assert payload["config"]["tolerances"]["root_abs"] == 1e-12


def test_unknown_config_key(tmp_path, capsys):
    code, _ = run(tmp_path, "--set", "bogus=1", "scan")
    assert code == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


def test_output_dir_env_override(tmp_path, monkeypatch):
    target = tmp_path / "envdir"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
    code = run_command([*FAST, "scan"])
    assert code == EXIT_OK
    assert (target / "scan.csv").exists()


def test_gramian_subcommand(tmp_path, capsys):
    code, out = run(tmp_path, "--gramian-n-max", "24", "gramian")
    assert code == EXIT_OK
    lines = (out / "gramian.csv").read_text().splitlines()
    assert lines[0] == "N,min_generalized_eigenvalue"
    assert len(lines) == 4
    assert "falls below" in capsys.readouterr().out


def test_contradiction_subcommand(tmp_path, capsys):
    code, out = run(tmp_path, *FAST, "contradiction")
    assert code == EXIT_OK
    assert (out / "contradiction.csv").exists()
    payload = json.loads((out / "contradiction.json").read_text())
    assert payload["M_star"] >= 0
    assert "crossover" in capsys.readouterr().out


def test_simulate_subcommand(tmp_path):
    code, out = run(tmp_path, "simulate", "--M", "1", "--control-amplitude",
                    "0.2")
    assert code == EXIT_OK
    assert (out / "trajectory.csv").read_text().splitlines()[0] == "t,mode,y,z"
    duality = (out / "duality.csv").read_text().splitlines()
    assert duality[0] == "mode,residual"
    assert all(float(line.split(",")[1]) < 1e-7 for line in duality[1:])


def test_report_subcommand(tmp_path):
    code, out = run(tmp_path, *FAST, "--gramian-n-max", "32", "report",
                    "--emit-plots")
    assert code == EXIT_OK
    for name in ("scan.csv", "contradiction.csv", "gramian.csv",
                 "summary.json", "scan.gp"):
        assert (out / name).exists()
    payload = json.loads((out / "summary.json").read_text())
    assert set(payload["verdicts"]) >= {
        "initial_norm_slope_in_window", "boundary_weighted_slope_below_max",
        "quotient_slope_above_min", "quotient_strictly_increasing",
        "pairing_slope_in_window", "bound_slope_below_max",
        "crossover_finite", "gramian_nonincreasing"}
    assert "pairing" in payload["slopes"]


def test_runconfig_validation_messages():
    cfg = RunConfig(n_max=10)
    with pytest.raises(Exception) as exc:
        cfg.validate()
    assert "n_max" in str(exc.value)
