"""Command-line entry points, exercised in-process through main()."""

import json
import math

import pytest

from vvflow import (BOUND_TABLE_HEADER, DIAGNOSTICS_HEADER, GronwallParams,
                    SolverInstabilityError, r_star, read_diagnostics_csv)
from vvflow.cli import main

RUN_INI = """\
[sim]
n = 16
nu = 0.02
T = 0.2
samples = 10

[scenario]
kind = taylor_green
"""

SWEEP_INI = """\
[sim]
n = 32
T = 0.2
samples = 10

[scenario]
kind = taylor_green

[forcing]
kind = low_mode
amplitude = 0.05
"""

TWO_PI_SQ = 2.0 * math.pi ** 2


def test_run_writes_artifacts_and_reports_gates(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "run.ini").write_text(RUN_INI)
    assert main(["run", "run.ini"]) == 0
    out = capsys.readouterr().out
    assert "run finished" in out
    assert out.count("PASS") == 2 and "FAIL" not in out
    for name in ("diagnostics.csv", "lp_bound.csv", "manifest.json"):
        assert (tmp_path / "run_out" / name).exists(), name


def test_run_flag_overrides_config_value(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "run.ini").write_text(RUN_INI)
    assert main(["run", "run.ini", "--sim.nu", "0.05", "--sim.outdir", "custom"]) == 0
    manifest = json.loads((tmp_path / "custom" / "manifest.json").read_text())
    assert manifest["config"]["sim"]["nu"] == 0.05


def test_run_gate_failure_sets_exit_status(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    # an unreachable residual gate under [sim] forces a FAIL exit
    (tmp_path / "strict.ini").write_text(RUN_INI.replace(
        "samples = 10", "samples = 10\ngate_residual = 1e-16"))
    assert main(["run", "strict.ini"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_run_malformed_config_names_field(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "bad.ini").write_text("[sim]\nn = sixteen\n")
    assert main(["run", "bad.ini"]) == 1
    err = capsys.readouterr().err
    assert "config error" in err and "sim.n" in err

    (tmp_path / "bad2.ini").write_text("[sim]\nwidth = 16\n")
    assert main(["run", "bad2.ini"]) == 1
    assert "sim.width" in capsys.readouterr().err


def test_run_instability_reports_failure_time(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "run.ini").write_text(RUN_INI)

    def explode(cfg):
        raise SolverInstabilityError(0.125)

    monkeypatch.setattr("vvflow.cli.run_single", explode)
    assert main(["run", "run.ini"]) == 1
    err = capsys.readouterr().err
    assert "unstable" in err and "0.125" in err


def test_sweep_cli_end_to_end(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "sw.ini").write_text(SWEEP_INI)
    assert main(["sweep", "sw.ini", "--nu", "1e-1,3e-2,1e-2,3e-3", "--serial"]) == 0
    out = capsys.readouterr().out
    assert "sweep case BELOW" in out
    assert "fitted slope" in out
    table = (tmp_path / "sw_sweep" / "bound_table.csv").read_text().splitlines()
    assert table[0] == BOUND_TABLE_HEADER
    assert len(table) == 5
    assert (tmp_path / "sw_sweep" / "nu_0.003" / "comparison.csv").exists()


def test_sweep_rejects_bad_nu_list(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "sw.ini").write_text(SWEEP_INI)
    with pytest.raises(SystemExit):
        main(["sweep", "sw.ini", "--nu", "0.1,banana"])
    with pytest.raises(SystemExit):
        main(["sweep", "sw.ini", "--nu", ","])


def test_taylor_green_writes_analytic_twin(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["taylor-green", "--n", "16", "--nu", "0.05", "--T", "0.2",
                 "--samples", "10", "--outdir", "tg"]) == 0
    out = capsys.readouterr().out
    assert "worst energy deviation" in out
    measured = read_diagnostics_csv(tmp_path / "tg" / "diagnostics.csv")
    analytic = read_diagnostics_csv(tmp_path / "tg" / "analytic.csv")
    assert (tmp_path / "tg" / "analytic.csv").read_text().splitlines()[0] == DIAGNOSTICS_HEADER
    assert len(measured) == len(analytic) == 11
    for m, a in zip(measured, analytic):
        assert m.t == a.t
        assert abs(m.energy - a.energy) < 1e-8 * TWO_PI_SQ
        assert abs(m.enstrophy - a.enstrophy) < 2e-8 * 2.0 * TWO_PI_SQ
        assert abs(m.lp_norm - a.lp_norm) < 1e-8 * a.lp_norm
    assert analytic[-1].cum_work == 0.0


def test_gronwall_table_stdout(capsys):
    assert main(["gronwall-table", "--p", "1.5", "--A", "1e-3", "--B", "0.2",
                 "--nu", "0.01,0.001", "--t", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == BOUND_TABLE_HEADER
    assert len(lines) == 3
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[1] == "ABOVE"              # z0 defaults to infinity
        assert cells[4] == "inf"
        assert cells[6] == "nan"
        assert float(cells[5]) > 0


def test_gronwall_table_file_and_below_case(tmp_path, capsys):
    out = tmp_path / "table.csv"
    assert main(["gronwall-table", "--p", "1.5", "--A", "1e-3", "--B", "0.2",
                 "--nu", "0.01,0.001", "--t", "0.5", "--z0", "1.0",
                 "--out", str(out)]) == 0
    assert "bound table written" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    cells = lines[1].split(",")
    pr = GronwallParams(A=1e-3, B=0.2, alpha=4.0, nu=0.01)
    assert cells[1] == "BELOW"                  # z0 = 1 sits far under r_star
    assert float(cells[5]) == 0.01 * 0.5 * r_star(pr)


def test_verify_subcommand_runs_desk_checks(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert "0 failed" in out


def test_help_and_missing_subcommand():
    with pytest.raises(SystemExit):
        main(["--help"])
    with pytest.raises(SystemExit):
        main([])
