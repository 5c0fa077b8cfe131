import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinchain.errors import ParamError
from spinchain.inversion import InversionPlan, invert
from spinchain.model import (ChainSpec, InitialState, Provenance, ReservoirSpec, TimeGrid,
                             Trajectory, validate)
from spinchain.observables import (ObservableSeries, SeriesKind, SweepTemplate,
                                   dominant_frequency, fidelity, max_fidelity_sweep,
                                   populations)
from spinchain.oracle import PseudomodeSystem, solve_pseudomode


def trajectory_from(grid, amplitudes):
    return Trajectory(grid=grid, amplitudes=amplitudes,
                      provenance=Provenance.PSEUDOMODE_ORACLE)


class TestPopulations:
    def test_closed_chain_total_is_unity(self, closed_chain_config, fast_plan):
        traj = invert(closed_chain_config, fast_plan, TimeGrid.linspace(40.0, 81))
        pops = populations(traj)
        assert np.max(np.abs(pops["P_total"].values - 1.0)) < 1e-8

    def test_rabi_populations(self, fast_plan):
        res = ReservoirSpec.lorentzian(g=0.0, gamma=1.0, delta_c=0.0)
        cfg = validate(ChainSpec(n_sites=2), res, res, InitialState.first_site(2))
        grid = TimeGrid.linspace(30.0, 121)
        pops = populations(invert(cfg, fast_plan, grid))
        assert np.max(np.abs(pops["P_1"].values - np.cos(grid.t_values / 2) ** 2)) < 1e-8
        assert np.max(np.abs(pops["P_2"].values - np.sin(grid.t_values / 2) ** 2)) < 1e-8

    def test_partition_identity_exact(self, fig2a_config, fast_plan):
        traj = invert(fig2a_config, fast_plan, TimeGrid.linspace(25.0, 51))
        pops = populations(traj)
        rebuilt = pops["P_1"].values + pops["P_channel"].values + pops["P_5"].values
        assert np.array_equal(rebuilt, pops["P_total"].values)

    def test_labels_and_kinds(self, fig2a_config, fast_plan):
        pops = populations(invert(fig2a_config, fast_plan, TimeGrid.linspace(5.0, 6)))
        assert set(pops) == {"P_1", "P_2", "P_3", "P_4", "P_5", "P_channel", "P_total"}
        assert pops["P_3"].kind is SeriesKind.SITE and pops["P_3"].site == 3

    def test_mirror_swap(self, fast_plan):
        n = 5
        rng = np.random.default_rng(8)
        init = InitialState.normalized(rng.normal(size=n) + 1j * rng.normal(size=n))
        res_a = ReservoirSpec.lorentzian(g=0.4, gamma=0.1, delta_c=0.2)
        res_b = ReservoirSpec.lorentzian(g=0.9, gamma=0.3, delta_c=-0.4)
        grid = TimeGrid.linspace(12.0, 25)
        fwd = invert(validate(ChainSpec(n_sites=n), res_a, res_b, init), fast_plan, grid)
        mirrored = InitialState(init.amplitudes[::-1])
        bwd = invert(validate(ChainSpec(n_sites=n), res_b, res_a, mirrored), fast_plan, grid)
        p_fwd = populations(fwd)
        p_bwd = populations(bwd)
        assert np.allclose(p_fwd["P_1"].values, p_bwd["P_5"].values, atol=1e-9)
        assert np.allclose(p_fwd["P_5"].values, p_bwd["P_1"].values, atol=1e-9)


class TestFidelity:
    def test_anchor_values(self):
        grid = TimeGrid(np.array([0.0, 1.0, 2.0]))
        amps = np.zeros((3, 2), dtype=complex)
        amps[0, 1] = 1.0    # |c_N| = 1 -> 1
        amps[1, 1] = 0.0    # |c_N| = 0 -> 1/2
        amps[2, 1] = 0.5    # -> 0.5 + 0.25/6 + 0.5/3
        amps[1, 0] = 1.0
        amps[2, 0] = np.sqrt(1 - 0.25)
        fid = fidelity(trajectory_from(grid, amps))
        assert fid.values[0] == pytest.approx(1.0, abs=1e-15)
        assert fid.values[1] == pytest.approx(0.5, abs=1e-15)
        assert fid.values[2] == pytest.approx(0.5 + 0.25 / 6 + 0.5 / 3, abs=1e-15)

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=24))
    def test_monotone_in_magnitude(self, mags):
        mags = sorted(mags)
        vals = [0.5 + m * m / 6 + m / 3 for m in mags]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert all(0.5 <= v <= 1.0 + 1e-12 for v in vals)

    def test_range_enforced(self):
        grid = TimeGrid(np.array([0.0]))
        with pytest.raises(ParamError):
            ObservableSeries(grid=grid, values=np.array([0.3]), kind=SeriesKind.FIDELITY)


class TestMaxFidelitySweep:
    def test_transfer_degrades_with_length_and_coupling(self):
        res0 = ReservoirSpec.lorentzian(g=0.0, gamma=0.5, delta_c=0.0)
        res3 = ReservoirSpec.lorentzian(g=0.3, gamma=0.5, delta_c=0.0)
        plan = InversionPlan(n_terms=256, euler_depth=24)
        free = max_fidelity_sweep(SweepTemplate(res1=res0, res2=res0, plan=plan), [4, 8])
        damped = max_fidelity_sweep(SweepTemplate(res1=res3, res2=res3, plan=plan), [4, 8])
        assert free[0].max_fidelity > free[1].max_fidelity
        assert free[0].max_fidelity > damped[0].max_fidelity
        assert free[1].max_fidelity > damped[1].max_fidelity
        # first arrival near t ~ N: the peak time grows with N
        assert free[1].t_at_max > free[0].t_at_max

    def test_horizon_must_cover_first_arrival(self):
        res = ReservoirSpec.lorentzian(g=0.0, gamma=0.5, delta_c=0.0)
        with pytest.raises(ParamError):
            max_fidelity_sweep(SweepTemplate(res1=res, res2=res), [8], horizon=2.0)

    def test_refinement_beats_coarse_grid(self):
        res = ReservoirSpec.lorentzian(g=0.0, gamma=0.5, delta_c=0.0)
        plan = InversionPlan(n_terms=256, euler_depth=24)
        coarse = max_fidelity_sweep(SweepTemplate(res1=res, res2=res, plan=plan), [6],
                                    points_per_time=3.0)[0]
        fine = max_fidelity_sweep(SweepTemplate(res1=res, res2=res, plan=plan), [6],
                                  points_per_time=40.0)[0]
        assert coarse.max_fidelity <= fine.max_fidelity + 1e-9
        assert coarse.max_fidelity == pytest.approx(fine.max_fidelity, abs=2e-4)


class TestDominantFrequency:
    def test_synthetic_sine(self):
        grid = TimeGrid.linspace(100.0, 2001)
        vals = 0.4 + 0.3 * np.cos(2 * np.pi * 0.35 * grid.t_values)
        series = ObservableSeries(grid=grid, values=vals, kind=SeriesKind.TOTAL)
        assert dominant_frequency(series) == pytest.approx(0.35, abs=0.01)

    def test_edge_oscillation_slows_with_length(self):
        # short strongly-driven chains: edge-to-edge oscillation frequency
        # drops as the chain grows
        freqs = []
        for n in (3, 4, 5):
            res = ReservoirSpec.lorentzian(g=1.8, gamma=0.01, delta_c=0.0)
            cfg = validate(ChainSpec(n_sites=n), res, res, InitialState.first_site(n))
            grid = TimeGrid.linspace(400.0, 4001)
            traj = solve_pseudomode(PseudomodeSystem.from_config(cfg), grid)
            freqs.append(dominant_frequency(populations(traj)["P_1"]))
        assert freqs[0] > freqs[1] > freqs[2]
