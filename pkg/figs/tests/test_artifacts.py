import json

import numpy as np
import pytest

from spinchain_figs.artifacts import (MetadataMismatch, MissingInput, classify,
                                      load_density_table, load_sweep_summary,
                                      load_trajectory)

from conftest import damped_populations, write_sweep_summary, write_trajectory


class TestTrajectoryLoading:
    def test_round_trip(self, tmp_path):
        t = np.linspace(0.0, 10.0, 21)
        pops = damped_populations(t, 4)
        path = write_trajectory(tmp_path, "run", 4, t, pops)
        table = load_trajectory(path)
        assert table.n_sites == 4
        assert np.allclose(table.t, t)
        assert np.allclose(table.population(1), pops[:, 0])
        assert np.allclose(table.total, pops.sum(axis=1))
        assert table.config_value("reservoirs.left.g") == 0.3

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingInput):
            load_trajectory(tmp_path / "nope.csv")

    def test_missing_sidecar(self, tmp_path):
        t = np.linspace(0.0, 1.0, 3)
        path = write_trajectory(tmp_path, "run", 3, t, damped_populations(t, 3))
        (tmp_path / "run.meta.json").unlink()
        with pytest.raises(MetadataMismatch):
            load_trajectory(path)

    def test_sidecar_site_count_must_match(self, tmp_path):
        t = np.linspace(0.0, 1.0, 3)
        path = write_trajectory(tmp_path, "run", 3, t, damped_populations(t, 3))
        meta = json.loads((tmp_path / "run.meta.json").read_text())
        meta["config"]["chain"]["n_sites"] = 7
        (tmp_path / "run.meta.json").write_text(json.dumps(meta))
        with pytest.raises(MetadataMismatch):
            load_trajectory(path)


class TestSummaryLoading:
    def test_round_trip(self, tmp_path):
        values = np.array([4.0, 8.0, 12.0])
        path = write_sweep_summary(tmp_path, "s", values, [0.9, 0.8, 0.7], [0.5, 0.6, 0.7])
        summary = load_sweep_summary(path)
        assert np.allclose(summary.values, values)
        assert np.allclose(summary.max_fidelity, [0.9, 0.8, 0.7])
        assert summary.axis == "chain.n_sites"

    def test_error_rows_are_skipped(self, tmp_path):
        path = write_sweep_summary(tmp_path, "s", [4.0, 8.0], [0.9, 0.8], [0.5, 0.6])
        text = path.read_text().splitlines()
        text.insert(2, "6,error,,,,DimensionError")
        path.write_text("\n".join(text) + "\n")
        summary = load_sweep_summary(path)
        assert np.allclose(summary.values, [4.0, 8.0])


class TestClassifyAndDensity:
    def test_classify(self, tmp_path):
        t = np.linspace(0.0, 1.0, 3)
        traj = write_trajectory(tmp_path, "run", 3, t, damped_populations(t, 3))
        summ = write_sweep_summary(tmp_path, "s", [4.0], [0.9], [0.5])
        dens = tmp_path / "dens.txt"
        dens.write_text("# header\n0.0 0.1\n1.0 0.2\n")
        assert classify(traj) == "trajectory"
        assert classify(summ) == "summary"
        assert classify(dens) == "density"

    def test_density_table(self, tmp_path):
        dens = tmp_path / "dens.txt"
        dens.write_text("# omega J\n0.0 0.0\n1.0 0.25\n2.0 0.0\n")
        omega, j = load_density_table(dens)
        assert omega.tolist() == [0.0, 1.0, 2.0]
        assert j[1] == 0.25
        with pytest.raises(MissingInput):
            load_density_table(tmp_path / "absent.txt")
