import csv

import numpy as np
import pytest

from radm.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY, main
from radm.spectral import read_checkpoint


def write_cfg(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text + f"\noutput = {tmp_path / 'out'}\n")
    return p


def test_run_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n = 16\nsteps = 6\ndt = 0.005\ncheckpoint_interval = 3\nspectrum_interval = 3")
    assert main(["run", str(cfg)]) == EXIT_OK
    out = tmp_path / "out"
    names = sorted(p.name for p in out.iterdir())
    for expected in ("scalars.csv", "spectrum_000003.csv", "checkpoint_000006.radm", "spectrum_avg.csv", "final.radm"):
        assert expected in names
    with open(out / "scalars.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "time", "E", "E_M", "dissipation", "balance_residual"]
    assert len(rows) == 8
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("final step=6") and "E_M=" in line and "slope[4,8]" in line


def test_run_is_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\nsteps = 4\ndt = 0.005")
    main(["run", str(cfg)])
    first = (tmp_path / "out" / "scalars.csv").read_bytes()
    main(["run", str(cfg)])
    assert (tmp_path / "out" / "scalars.csv").read_bytes() == first


def test_run_zero_steps(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\nsteps = 0")
    assert main(["run", str(cfg)]) == EXIT_OK
    rows = (tmp_path / "out" / "scalars.csv").read_text().splitlines()
    assert len(rows) == 2


def test_run_set_override(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\nsteps = 1")
    assert main(["run", str(cfg), "--set", "steps=2"]) == EXIT_OK
    assert len((tmp_path / "out" / "scalars.csv").read_text().splitlines()) == 4


def test_run_bad_config(tmp_path):
    cfg = write_cfg(tmp_path, "n = 7")
    assert main(["run", str(cfg)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


def test_run_blowup_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\nsteps = 200\ndt = 2.0\ninit_energy = 100\nnu = 0\nforcing = none\ncfl_action = ignore\ncheckpoint_interval = 1")
    assert main(["run", str(cfg)]) == EXIT_NUMERICAL
    assert (tmp_path / "out" / "checkpoint_000000.radm").exists()


def test_run_cfl_abort(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\nsteps = 3\ndt = 1.0\ninit_energy = 10\ncfl_action = abort")
    assert main(["run", str(cfg)]) == EXIT_NUMERICAL


def test_spectrum_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n = 16\nsteps = 2")
    main(["run", str(cfg)])
    capsys.readouterr()
    ck = tmp_path / "out" / "final.radm"
    target = tmp_path / "s.csv"
    assert main(["spectrum", str(ck), "-o", str(target), "--band", "2:5"]) == EXIT_OK
    lines = target.read_text().splitlines()
    assert lines[0] == "k,E,EM" and lines[-1].startswith("# slope[2,5]=")
    E = np.array([float(r.split(",")[1]) for r in lines[1:-1]])
    v = read_checkpoint(ck).field.coeffs
    assert np.isclose(E.sum(), 0.5 * (np.abs(v) ** 2).sum())
    bad = tmp_path / "bad.radm"
    bad.write_bytes(b"nonsense")
    assert main(["spectrum", str(bad)]) == EXIT_CONFIG


def test_pulsatile_command(tmp_path):
    case = tmp_path / "case.cfg"
    case.write_text("geometry = channel\nnpoints = 11\n")
    out = tmp_path / "p.csv"
    assert main(["pulsatile", str(case), "-o", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert "# Wo=12.0" in header
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == "x,w" and len(data) == 12
    case.write_text("geometry = pipe\nnpoints = 5\nalpha = 0.1\n")
    assert main(["pulsatile", str(case), "-o", str(out)]) == EXIT_OK
    assert "r,ReW,ImW" in out.read_text()
    case.write_text("geometry = pipe\nnu = -1\n")
    assert main(["pulsatile", str(case)]) == EXIT_CONFIG


def test_verify_passes(capsys):
    assert main(["verify"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize("which", ["symbol", "dealias"])
def test_verify_detects_injection(which, capsys):
    assert main(["verify", "--inject", which]) == EXIT_VERIFY
    assert "FAIL" in capsys.readouterr().out
