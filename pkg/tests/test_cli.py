import subprocess
import sys

import pytest

from forceomit.cli import _join_negative_values, run_subcommand
from forceomit.config import BASELINE_CONFIG_TEXT
from forceomit.tables import read_csv


def run(capsys, *argv):
    code = run_subcommand(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_calibrate_prints_red_force(capsys, tmp_path):
    code, out, _ = run(capsys, "calibrate", "--target-delta", "+1.0", "--out", str(tmp_path))
    assert code == 0
    force = float(out.split()[0].split("=")[1])
    assert force == pytest.approx(-4.74e-6, rel=0.01)
    assert (tmp_path / "calibrate.csv").exists()


def test_spectrum_csv_schema(capsys, tmp_path):
    code, out, _ = run(
        capsys, "spectrum", "--force", "-4.74e-6", "--delta-min", "0.995", "--delta-max", "1.005",
        "--points", "11", "--out", str(tmp_path), "--svg",
    )
    assert code == 0
    header, rows = read_csv(tmp_path / "spectrum.csv")
    assert header == [
        "axis",
        "eps_T_re", "eps_T_im",
        "eps_T_rwa_re", "eps_T_rwa_im",
        "eps_T_antirwa_re", "eps_T_antirwa_im",
        "transmission_re", "transmission_im",
        "phase", "tau", "phase_unwrapped",
    ]
    assert len(rows) == 11
    assert rows[0][0] == pytest.approx(0.995)
    assert (tmp_path / "spectrum.svg").exists()


def test_delay_without_force_is_bare_cavity(capsys, tmp_path):
    code, out, _ = run(capsys, "delay", "--sideband", "red", "--force", "0", "--out", str(tmp_path))
    assert code == 0
    tau = float(out.split()[0].split("=")[1])
    assert abs(tau) < 1e-5


def test_steady_summary(capsys, tmp_path):
    code, out, _ = run(capsys, "steady", "--force", "-4e-6", "--out", str(tmp_path))
    assert code == 0
    assert out.startswith("q0=")
    assert "stable=False" in out


def test_invert_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "delay", "--force", "-4.7e-6", "--out", str(tmp_path))
    tau = out.split()[0].split("=")[1]
    code, out, _ = run(capsys, "invert", "--tau", tau, "--f-guess", "-4.71e-6", "--out", str(tmp_path))
    assert code == 0
    assert float(out.split()[0].split("=")[1]) == pytest.approx(-4.7e-6, rel=1e-6)


def test_invert_out_of_range_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "invert", "--tau", "1.0", "--f-guess", "-4.7e-6", "--out", str(tmp_path))
    assert code == 10
    assert "OutOfMonotoneRange" in err


def test_sweep_force(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep-force", "--points", "11", "--out", str(tmp_path))
    assert code == 0
    assert "failed_rows=0" in out
    assert (tmp_path / "sweep_force.csv").exists()
    assert (tmp_path / "delay_vs_force_red.csv").exists()


def test_fig3_writes_four_panels(capsys, tmp_path):
    code, out, _ = run(capsys, "fig3", "--out", str(tmp_path))
    assert code == 0
    for panel in "abcd":
        assert (tmp_path / f"fig3{panel}.csv").exists()


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "steady", "--config", str(tmp_path / "absent.cfg"))
    assert code == 2


def test_bad_config_exit_code(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(BASELINE_CONFIG_TEXT.replace("mass_ng = 145", "mass_ng = heavy"))
    code, _, err = run(capsys, "steady", "--config", str(cfg))
    assert code == 2
    assert "mass_ng" in err


def test_multistable_exit_code(capsys, tmp_path):
    cfg = tmp_path / "bi.cfg"
    text = BASELINE_CONFIG_TEXT.replace("pump_power_mW = 0.2", "pump_power_mW = 50")
    text = text.replace("delta_c_in_omega_m = -10", "delta_c_in_omega_m = 3") + "branch_policy = unique\n"
    cfg.write_text(text)
    code, _, err = run(capsys, "steady", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 4


def test_output_error_exit_code(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, _ = run(capsys, "steady", "--out", str(blocker / "sub"))
    assert code == 11


def test_usage_error(capsys):
    code, _, _ = run(capsys, "teleport")
    assert code == 2


def test_negative_values_are_joined():
    assert _join_negative_values(["delay", "--force", "-4e-6", "--sideband", "red"]) == [
        "delay",
        "--force=-4e-6",
        "--sideband",
        "red",
    ]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "forceomit", "calibrate", "--target-delta", "-1", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert float(proc.stdout.split()[0].split("=")[1]) == pytest.approx(-3.88e-6, rel=0.01)
