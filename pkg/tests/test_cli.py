import subprocess
import sys

import pytest

from bragg_backflow.cli import main
from bragg_backflow.interference import read_csv


def run(tmp_path, *args):
    return main([args[0], "--out", str(tmp_path), *args[1:]])


def test_simulate_outputs(tmp_path, capsys):
    assert run(tmp_path, "simulate") == 0
    for name in ("profile.csv", "flux.svg", "density.svg", "report.txt"):
        assert (tmp_path / name).stat().st_size > 0
    report = (tmp_path / "report.txt").read_text()
    assert "backflow windows:" in report
    assert "FAIL" not in report
    assert (tmp_path / "flux.svg").read_text().startswith("<svg")


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "simulate") == 0
    assert run(b, "simulate") == 0
    assert (a / "profile.csv").read_bytes() == (b / "profile.csv").read_bytes()


def test_simulate_without_kick(tmp_path):
    assert run(tmp_path, "simulate", "--set", "A2=0") == 0
    assert "no backflow windows" in (tmp_path / "report.txt").read_text()
    data = read_csv(tmp_path / "profile.csv")
    assert data["x_m"].size > 0


def test_bad_inputs_exit_2(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--set", "alpha=-1") == 2
    assert run(tmp_path, "simulate", "--set", "nonsense") == 2
    assert run(tmp_path, "simulate", "--config", str(tmp_path / "missing.cfg")) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_design_sweep(tmp_path):
    assert run(tmp_path, "design", "--alphas", "0.5,3,20") == 0
    lines = (tmp_path / "design_sweep.csv").read_text().splitlines()
    assert lines[0].startswith("alpha,A2_opt")
    assert len(lines) == 4
    kv = dict(line.split(" = ") for line in (tmp_path / "design.kv").read_text().splitlines())
    assert float(kv["A2_opt"]) == pytest.approx(0.4927, abs=1e-4)


def test_imaging_sweep(tmp_path, capsys):
    assert run(tmp_path, "imaging", "--sigma-steps", "5") == 0
    assert len((tmp_path / "detectability.csv").read_text().splitlines()) == 6
    assert "sigma_r* = 3.6" in capsys.readouterr().out


def test_validate_quick(tmp_path, capsys):
    assert run(tmp_path, "validate", "--quick") == 0
    out = capsys.readouterr().out
    assert "9/9 checks passed" in out


def test_validate_negative_control(tmp_path, capsys):
    # a time step 100 times the configured one must not pass silently
    assert run(tmp_path, "validate", "--quick", "--set", "oracle_dt=0.1") == 1
    assert "FAIL" in capsys.readouterr().out


def test_oracle_run(tmp_path):
    assert run(tmp_path, "oracle-run", "--set", "oracle_points=2048") == 0
    for stage in ("ground", "released", "expanded", "kicked"):
        assert (tmp_path / f"snapshot_{stage}.csv").exists()
    assert (tmp_path / "final.ckpt").exists()
    assert "pre-Bragg negative flux in packet body: False" in (tmp_path / "oracle_report.txt").read_text()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bragg_backflow", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout
