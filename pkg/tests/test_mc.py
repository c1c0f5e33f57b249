"""Monte Carlo module: sampling, empirical surfaces, channel synthesis,
and the correlation estimators.

The statistical tests pin seeds and use tolerances measured at roughly
twice the observed error, so they are deterministic.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from conftest import C_AIR, aircraft_range, aircraft_scenario
from uscatter import density, mc
from uscatter.geometry import DelayRange, PlaneCoeffs, Scenario
from uscatter.mc import ChannelRealization
from uscatter.surfaces import GridSpec

TWO_PI = 2.0 * math.pi


def static_aircraft() -> Scenario:
    sc = aircraft_scenario()
    return dataclasses.replace(sc, v_t=(0.0, 0.0, 0.0), v_r=(0.0, 0.0, 0.0))


class TestSampleScatterers:
    def test_determinism(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        a = mc.sample_scatterers(sc, r, 500, 7)
        b = mc.sample_scatterers(sc, r, 500, 7)
        assert np.array_equal(a.xi, b.xi)
        assert np.array_equal(a.f_d, b.f_d)
        c = mc.sample_scatterers(sc, r, 500, 8)
        assert not np.array_equal(a.xi, c.xi)

    def test_membership_and_derived_columns(self):
        """Samples sit on the plane, inside the delay band, with
        consistent weights, delays, and Doppler values."""
        sc = aircraft_scenario()
        r = aircraft_range()
        s = mc.sample_scatterers(sc, r, 20_000, 9)
        assert s.n == 20_000
        p = sc.plane
        residual = np.abs(p.A * s.x + p.B * s.y + p.C * s.z - sc.l * p.D)
        assert residual.max() < 1e-9 * sc.l
        assert s.xi.min() >= r.xi_min and s.xi.max() <= r.xi_max
        assert np.all(np.abs(s.eta) <= 1.0)
        assert np.all((s.theta >= 0.0) & (s.theta < TWO_PI))
        np.testing.assert_allclose(s.tau, 2.0 * sc.l * s.xi / sc.c, rtol=1e-12)
        np.testing.assert_array_equal(s.w, density.weight(s.xi, s.eta))
        lo, hi = density.doppler_support(sc, s.xi)
        slack = 1e-6 * np.abs(s.f_d).max()
        assert np.all(s.f_d >= lo - slack)
        assert np.all(s.f_d <= hi + slack)

    def test_positive_count_required(self):
        with pytest.raises(ValueError, match="positive sample count"):
            mc.sample_scatterers(aircraft_scenario(), aircraft_range(), 0, 1)

    def test_plane_missing_outer_shell(self):
        far = Scenario(
            l=100.0,
            plane=PlaneCoeffs(A=0.0, B=0.0, C=1.0, D=20.0),
            v_t=(0.0, 0.0, 0.0),
            v_r=(0.0, 0.0, 0.0),
            f_c=1e9,
            c=C_AIR,
        )
        with pytest.raises(ValueError, match="misses the outer delay shell"):
            mc.sample_scatterers(far, DelayRange(xi_min=2.0, xi_max=12.0), 10, 1)

    def test_sliver_band_aborts(self):
        """A delay band much thinner than the bounding box starves the
        rejection sampler."""
        r = DelayRange(xi_min=12.239999, xi_max=12.24)
        with pytest.raises(ValueError, match="acceptance rate below"):
            mc.sample_scatterers(aircraft_scenario(), r, 500, 1)


class TestEmpiricalSurface:
    xi_grid = GridSpec("xi", 2.11, 12.24, 16)
    fd_grid = GridSpec("f_d", -120.0, 120.0, 14)

    def test_unit_mass_and_meta(self):
        s = mc.sample_scatterers(aircraft_scenario(), aircraft_range(), 50_000, 3)
        surf = mc.empirical_surface(s, self.xi_grid, self.fd_grid)
        area = np.outer(self.xi_grid.cell_widths(), self.fd_grid.cell_widths())
        assert np.sum(np.real(surf.values) * area) == pytest.approx(1.0, abs=1e-12)
        assert np.all(surf.values.imag == 0.0)
        assert surf.meta["n_samples"] == 50_000
        assert surf.meta["seed"] == 3
        occupied = int(np.count_nonzero(surf.values))
        assert surf.meta["occupied_cells"] == occupied

    def test_grid_missing_all_samples(self):
        s = mc.sample_scatterers(aircraft_scenario(), aircraft_range(), 1000, 3)
        off_band = GridSpec("f_d", 1.0e6, 2.0e6, 5)
        with pytest.raises(ValueError, match="no weighted samples"):
            mc.empirical_surface(s, self.xi_grid, off_band)

    def test_converges_to_cell_quadrature(self):
        """Histogram cell masses approach the quadrature cell masses,
        and the L1 gap shrinks like 1/sqrt(n).

        Measured: 0.035 at 2e5 samples, 0.016 at 8e5 (seed 3).
        """
        sc = aircraft_scenario()
        r = aircraft_range()
        ref = density.joint_cell_probabilities(sc, r, self.xi_grid, self.fd_grid)
        area = np.outer(self.xi_grid.cell_widths(), self.fd_grid.cell_widths())
        gaps = []
        for n in (200_000, 800_000):
            s = mc.sample_scatterers(sc, r, n, 3)
            surf = mc.empirical_surface(s, self.xi_grid, self.fd_grid)
            p_emp = np.real(surf.values) * area
            assert p_emp.sum() == pytest.approx(1.0, abs=1e-12)
            gaps.append(np.abs(p_emp - ref).sum())
        assert gaps[0] < 0.06
        assert gaps[1] < 0.03
        assert gaps[1] < 0.75 * gaps[0]


class TestSynthesizeChannel:
    def test_validation(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        with pytest.raises(ValueError, match="at least one propagation path"):
            mc.synthesize_channel(sc, r, 0, 0.1, 1e-3, seed=1)
        with pytest.raises(ValueError, match="at least two time samples"):
            mc.synthesize_channel(sc, r, 5, 1.5e-3, 1e-3, seed=1)

    def test_determinism_and_phase_seed(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        args = dict(duration=0.016, dt=1e-3, seed=13, n_delay_bins=32)
        a = mc.synthesize_channel(sc, r, 200, **args)
        b = mc.synthesize_channel(sc, r, 200, **args)
        assert np.array_equal(a.h, b.h)
        # default phase stream is seed + 1
        c = mc.synthesize_channel(sc, r, 200, **args, phase_seed=14)
        assert np.array_equal(a.h, c.h)
        # re-phasing keeps the scatterer geometry but changes the field
        d = mc.synthesize_channel(sc, r, 200, **args, phase_seed=99)
        assert np.array_equal(a.paths_per_bin, d.paths_per_bin)
        assert np.array_equal(a.delays, d.delays)
        assert not np.array_equal(a.h, d.h)

    def test_delay_axis_and_counts(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        real = mc.synthesize_channel(sc, r, 300, 0.008, 1e-3, seed=13, n_delay_bins=64)
        assert real.paths_per_bin.sum() == 300
        np.testing.assert_allclose(
            real.xi_bins, real.delays * sc.c / (2.0 * sc.l), rtol=1e-12
        )
        tau_min = 2.0 * sc.l * r.xi_min / sc.c
        tau_max = 2.0 * sc.l * r.xi_max / sc.c
        assert real.delays[0] > tau_min and real.delays[-1] < tau_max
        assert real.dt == pytest.approx(1e-3, rel=1e-12)
        s = mc.sample_scatterers(sc, r, 300, 13)
        step = real.delays[1] - real.delays[0]
        bins = np.clip(((s.tau - tau_min) / step).astype(int), 0, 63)
        np.testing.assert_array_equal(
            real.paths_per_bin, np.bincount(bins, minlength=64)
        )

    def test_single_path_rotates_at_its_doppler(self):
        """One path is a pure phasor at +f_d in its delay bin."""
        sc = aircraft_scenario()
        r = aircraft_range()
        real = mc.synthesize_channel(sc, r, 1, 0.064, 1e-3, seed=21, n_delay_bins=64)
        power = np.sum(np.abs(real.h) ** 2, axis=0)
        (occ,) = np.nonzero(power)
        assert len(occ) == 1
        col = real.h[:, occ[0]]
        np.testing.assert_allclose(np.abs(col), 1.0, rtol=1e-12)
        f_d = mc.sample_scatterers(sc, r, 1, 21).f_d[0]
        increments = np.angle(col[1:] * np.conj(col[:-1]))
        np.testing.assert_allclose(increments, TWO_PI * f_d * 1e-3, rtol=1e-10)

    def test_static_scenario_is_time_invariant(self):
        real = mc.synthesize_channel(
            static_aircraft(), aircraft_range(), 200, 0.008, 1e-3, seed=4
        )
        assert np.abs(real.h - real.h[0]).max() == 0.0


def zero_realization() -> ChannelRealization:
    times = np.arange(8) * 1e-3
    delays = np.linspace(5e-6, 6e-6, 4)
    return ChannelRealization(
        times=times,
        delays=delays,
        xi_bins=delays * C_AIR / 100.0,
        h=np.zeros((8, 4), dtype=complex),
        n_paths=0,
        seed=0,
        paths_per_bin=np.zeros(4, dtype=int),
    )


class TestEstimateRL:
    dt_lags = GridSpec("dt", 0.0, 4e-3, 5)
    df_lags = GridSpec("f_d", 0.0, 20e3, 5)

    def test_origin_is_one(self):
        real = mc.synthesize_channel(
            aircraft_scenario(), aircraft_range(), 400, 0.032, 1e-3, seed=6
        )
        surf = mc.estimate_RL(real, self.dt_lags, self.df_lags, n_comb=64)
        assert surf.values[0, 0] == pytest.approx(1.0, abs=1e-14)
        assert np.abs(surf.values).max() <= 1.0 + 1e-9
        assert surf.meta["n_paths"] == 400.0
        assert surf.meta["comb_points"] == 64.0

    def test_static_single_path_frequency_phase(self):
        """One motionless path: correlation is a pure delay phasor at
        the bin center, flat over time lag."""
        real = mc.synthesize_channel(
            static_aircraft(), aircraft_range(), 1, 0.016, 1e-3, seed=21
        )
        surf = mc.estimate_RL(real, self.dt_lags, self.df_lags, n_comb=48)
        (occ,) = np.nonzero(real.paths_per_bin)
        tau_b = real.delays[occ[0]]
        want = np.exp(-2j * math.pi * self.df_lags.points() * tau_b)
        for b in range(self.dt_lags.n):
            np.testing.assert_allclose(surf.values[:, b], want, rtol=1e-10)

    def test_lag_validation(self):
        real = mc.synthesize_channel(
            aircraft_scenario(), aircraft_range(), 50, 0.016, 1e-3, seed=6
        )
        off_step = GridSpec("dt", 0.0, 1.5e-3, 2)
        with pytest.raises(ValueError, match="not a multiple of the step"):
            mc.estimate_RL(real, off_step, self.df_lags)
        too_long = GridSpec("dt", 0.0, 0.032, 3)
        with pytest.raises(ValueError, match="lag beyond record"):
            mc.estimate_RL(real, too_long, self.df_lags)
        no_zero = GridSpec("f_d", 10e3, 20e3, 3)
        with pytest.raises(ValueError, match="is not a grid node"):
            mc.estimate_RL(real, self.dt_lags, no_zero)

    def test_zero_power_raises(self):
        with pytest.raises(ValueError, match="zero power at the origin"):
            mc.estimate_RL(zero_realization(), self.dt_lags, self.df_lags)


class TestEstimatePh:
    dt_lags = GridSpec("dt", 0.0, 4e-3, 5)

    def test_zero_lag_column_and_empty_bins(self):
        real = mc.synthesize_channel(
            aircraft_scenario(), aircraft_range(), 100, 0.016, 1e-3, seed=13,
            n_delay_bins=64,
        )
        surf = mc.estimate_Ph(real, self.dt_lags)
        power = np.sum(np.abs(real.h) ** 2, axis=0)
        occupied = power > 0.0
        assert occupied.any() and (~occupied).any()
        np.testing.assert_allclose(surf.values[occupied, 0], 1.0, atol=1e-14)
        assert np.all(surf.values[~occupied] == 0.0)
        assert surf.meta["paths_per_bin"] == [int(c) for c in real.paths_per_bin]
        assert surf.axes[0].min == pytest.approx(real.xi_bins[0], rel=1e-12)
        assert surf.axes[0].max == pytest.approx(real.xi_bins[-1], rel=1e-12)

    def test_static_rows_are_flat(self):
        real = mc.synthesize_channel(
            static_aircraft(), aircraft_range(), 200, 0.016, 1e-3, seed=4
        )
        surf = mc.estimate_Ph(real, self.dt_lags)
        power = np.sum(np.abs(real.h) ** 2, axis=0)
        np.testing.assert_allclose(surf.values[power > 0.0], 1.0, atol=1e-13)

    def test_single_path_row_is_its_phasor(self):
        real = mc.synthesize_channel(
            aircraft_scenario(), aircraft_range(), 1, 0.064, 1e-3, seed=21
        )
        surf = mc.estimate_Ph(real, self.dt_lags)
        f_d = mc.sample_scatterers(aircraft_scenario(), aircraft_range(), 1, 21).f_d[0]
        (occ,) = np.nonzero(real.paths_per_bin)
        want = np.exp(2j * math.pi * f_d * self.dt_lags.points())
        np.testing.assert_allclose(surf.values[occ[0]], want, rtol=1e-9)


class TestPhaseAveraging:
    def test_phase_average_approaches_path_sum(self):
        """Averaging the correlation estimate over independent phase
        draws of one scatterer set converges to the deterministic
        weighted path sum.  Measured sup gap 0.019 at 16 draws."""
        sc = aircraft_scenario()
        r = aircraft_range()
        k = 4000
        dt_lags = GridSpec("dt", 0.0, 4.0e-3, 9)
        df_lags = GridSpec("f_d", 0.0, 20.0e3, 5)
        acc = None
        for ps in range(100, 116):
            real = mc.synthesize_channel(
                sc, r, k, 0.128, 0.5e-3, seed=5, n_delay_bins=256, phase_seed=ps
            )
            surf = mc.estimate_RL(real, dt_lags, df_lags, n_comb=96)
            acc = surf.values if acc is None else acc + surf.values
        acc /= 16.0
        s = mc.sample_scatterers(sc, r, k, 5)
        w = s.w / s.w.sum()
        direct = np.empty((df_lags.n, dt_lags.n), dtype=complex)
        for a, df in enumerate(df_lags.points()):
            for b, lag in enumerate(dt_lags.points()):
                direct[a, b] = np.sum(
                    w
                    * np.exp(-2j * math.pi * df * s.tau)
                    * np.exp(2j * math.pi * s.f_d * lag)
                )
        assert np.abs(acc - direct).max() < 0.03
