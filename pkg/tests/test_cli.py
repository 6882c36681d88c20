import subprocess
import sys

import pytest

from ensemble_coherence import cli, sweeps
from ensemble_coherence.sympovm import SweepRecord


def test_b92_to_file(tmp_path):
    out = tmp_path / "b92.csv"
    assert cli.main(["b92", "--e-grid", "3", "--out", str(out), "--threads", "1"]) == 0
    assert out.read_text().count("\n") == 3 + 7 - 1 + 1  # metadata lines + header + rows


def test_stdout_json(capsys):
    assert cli.main(["b92", "--e-grid", "2", "--format", "json"]) == 0
    assert '"rows"' in capsys.readouterr().out


def test_sym_requires_n():
    with pytest.raises(SystemExit) as exc:
        cli.main(["sym", "--e-grid", "3"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [["b92", "--e-grid", "1"], ["sym", "--n", "1"], ["asymptotic", "--n", "16"], ["b92", "--basis-tol", "-1"]],
)
def test_config_errors(argv):
    assert cli.main(argv) == 2


def test_verify_refuses_coarse_grid():
    assert cli.main(["verify", "--e-grid", "2"]) == 2


def test_io_error(tmp_path):
    assert cli.main(["b92", "--e-grid", "2", "--out", str(tmp_path / "missing" / "x.csv")]) == 3


def test_sandwich_violation_exit(monkeypatch):
    bad = SweepRecord(0.1, 0.5, 2, 0.9, 0.0, 0.0, 0.5, 0.1, 0.4)
    monkeypatch.setattr(sweeps, "b92_record", lambda e, basis_tol=1e-10: bad)
    assert cli.main(["b92", "--e-grid", "2", "--threads", "1"]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "ensemble_coherence", "sym", "--n", "3", "--e-grid", "2", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "# experiment=sym" in out.read_text()


@pytest.mark.slow
def test_verify_detects_degraded_optimizer(capsys):
    assert cli.main(["verify", "--basis-tol", "1.0"]) == 1
    assert "FAIL" in capsys.readouterr().out
