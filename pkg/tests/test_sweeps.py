import json
import math

import numpy as np
import pytest

from ensemble_coherence.qubit import DomainError
from ensemble_coherence.sweeps import SweepConfig, format_csv, read_csv, run_records, run_sweep
from ensemble_coherence.sympovm import SweepRecord

HEADER = "alpha,entanglement,n,coherence,optimal_gamma,optimal_theta,holevo,accessible_info,lower_bound"


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(experiment="nope"),
            dict(experiment="b92", e_grid=1),
            dict(experiment="b92", basis_tol=0.0),
            dict(experiment="sym"),
            dict(experiment="sym", n=1),
            dict(experiment="asymptotic", n=32),
            dict(experiment="b92", format="xml"),
            dict(experiment="b92", threads=0),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            SweepConfig(**kwargs)

    def test_defaults(self):
        cfg = SweepConfig("asymptotic")
        assert cfg.n == 256 and cfg.e_grid == 201 and cfg.seed == 1729


class TestB92Sweep:
    def test_three_points(self):
        rows = run_records(SweepConfig("b92", e_grid=3))
        assert [r.entanglement for r in rows] == pytest.approx([0.0, 0.5, 1.0], abs=1e-10)
        assert rows[0].coherence <= 1e-12 and rows[-1].coherence <= 1e-9
        assert all(r.n == 2 and r.optimal_gamma == pytest.approx(math.pi / 2) for r in rows)

    def test_c_equals_e_row(self):
        (row,) = run_records(SweepConfig("b92"), energies=[0.3])
        assert row.coherence == pytest.approx(0.3, abs=1e-3)

    def test_peak_row(self):
        rows = run_records(SweepConfig("b92", e_grid=201))
        e = np.array([r.entanglement for r in rows])
        peak = 0.6008760366928547
        assert abs(e[np.argmax([r.coherence for r in rows])] - peak) <= 0.005
        assert abs(e[np.argmax([r.lower_bound for r in rows])] - peak) <= 0.005


class TestSymSweep:
    def test_separable_row(self):
        (row,) = run_records(SweepConfig("sym", n=3), energies=[0.0])
        assert (row.coherence, row.holevo, row.accessible_info, row.lower_bound) == pytest.approx((0, 0, 0, 0), abs=1e-12)

    def test_e1_row_is_bb84(self):
        (row,) = run_records(SweepConfig("sym", n=4), energies=[1.0])
        # states |0>, |1>, |+>, |-> with equal weight, min over a real-basis grid
        theta = np.linspace(0, math.pi, 100_001)
        bloch = np.array([0, math.pi, math.pi / 2, 3 * math.pi / 2])
        q = np.cos((theta[:, None] - bloch[None, :]) / 2) ** 2
        q = np.clip(q, 1e-300, 1 - 1e-16)
        h = -(q * np.log2(q) + (1 - q) * np.log2(1 - q))
        oracle = h.mean(1).min()
        assert row.coherence == pytest.approx(oracle, abs=1e-9)
        assert row.optimal_gamma == pytest.approx(math.pi / 4, abs=1e-3)

    def test_n4_curve_peaks_before_maximal_entanglement(self):
        rows = run_records(SweepConfig("sym", n=4), energies=[0.9, 1.0])
        assert rows[0].coherence > rows[1].coherence

    def test_n2_matches_b92(self):
        e = np.linspace(0, 1, 11)
        a = run_records(SweepConfig("b92"), energies=e)
        b = run_records(SweepConfig("sym", n=2), energies=e)
        for x, y in zip(a, b):
            for k in ("coherence", "holevo", "accessible_info", "lower_bound"):
                assert abs(getattr(x, k) - getattr(y, k)) <= 1e-6


class TestOutput:
    def test_csv_layout(self, tmp_path):
        out = tmp_path / "b92.csv"
        text = run_sweep(SweepConfig("b92", e_grid=5, output_path=str(out), seed=7))
        lines = out.read_text().splitlines()
        assert text == out.read_text()
        assert lines[0] == "# experiment=b92"
        assert "# seed=7" in lines and "# grid=5" in lines
        assert HEADER in lines
        meta, rows = read_csv(text)
        assert meta["experiment"] == "b92" and len(rows) == 5
        assert list(rows[0]) == HEADER.split(",")

    def test_json_mirrors_csv(self, tmp_path):
        csv_text = run_sweep(SweepConfig("b92", e_grid=4))
        js = json.loads(run_sweep(SweepConfig("b92", e_grid=4, format="json")))
        _, rows = read_csv(csv_text)
        assert js["meta"]["experiment"] == "b92" and js["meta"]["seed"] == 1729
        assert [list(r) for r in js["rows"]] == [HEADER.split(",")] * 4
        for a, b in zip(rows, js["rows"]):
            for k in a:
                assert a[k] == pytest.approx(b[k], rel=1e-14, abs=1e-300)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = dict(experiment="sym", n=3, e_grid=4)
        a = run_sweep(SweepConfig(**cfg, threads=1))
        b = run_sweep(SweepConfig(**cfg, threads=1))
        c = run_sweep(SweepConfig(**cfg, threads=2))
        assert a == b == c

    def test_asymptotic_metadata(self):
        text = run_sweep(SweepConfig("asymptotic", n=64, e_grid=2))
        meta, rows = read_csv(text)
        assert float(meta["max_residual"]) == pytest.approx(
            max(abs(r["entanglement"] - r["coherence"] - r["accessible_info"]) for r in rows)
        )

    def test_float_format_roundtrips(self):
        rec = SweepRecord(0.1, 1 / 3, 2, 2 / 3, math.pi, 0.0, 1e-17, 0.25, 0.0)
        _, rows = read_csv(format_csv({"experiment": "x"}, [rec]))
        assert rows[0]["entanglement"] == pytest.approx(1 / 3, rel=1e-14)
        assert rows[0]["n"] == 2
