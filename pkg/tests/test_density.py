"""Weights, weighted areas, and delay / delay-Doppler densities."""

import math

import numpy as np
import pytest

from conftest import (
    aircraft_range,
    aircraft_scenario,
    random_complementary_scenario,
    random_general_scenario,
)
from uscatter.density import (
    QuadratureError,
    delay_pdf,
    doppler_support,
    joint_cell_probabilities,
    joint_pdf,
    line_density,
    line_density_complementary,
    line_density_general,
    row_cf_nodes,
    weight,
    weighted_area_complementary,
    weighted_area_general,
)
from uscatter.doppler import branch_doppler, complementary_frequencies
from uscatter.geometry import (
    DelayRange,
    PlaneCoeffs,
    Scenario,
    eta_bounds,
    psc_arrays_from_cartesian,
    xi_sr,
)
from uscatter.surfaces import GridSpec


def scenario_with_plane(base: Scenario, plane: PlaneCoeffs) -> Scenario:
    return Scenario(
        l=base.l, plane=plane, v_t=base.v_t, v_r=base.v_r, f_c=base.f_c, c=base.c
    )


class TestWeight:
    def test_known_values(self):
        assert weight(math.sqrt(2.0), 0.0) == pytest.approx(0.25, abs=1e-15)
        assert weight(2.0, 0.5) == pytest.approx(0.07111111111111111, abs=1e-12)

    def test_vectorized(self):
        out = weight(np.array([2.0, 3.0]), np.array([0.0, 0.5]))
        assert out.shape == (2,)
        assert out[0] == pytest.approx(1.0 / 16.0)

    def test_focus_line_rejected(self):
        with pytest.raises(ValueError, match="focus line"):
            weight(1.0, 1.0)
        with pytest.raises(ValueError, match="focus line"):
            weight(np.array([2.0, 1.0]), np.array([0.0, -1.0]))


class TestWeightedArea:
    def test_axial_plane_closed_form(self):
        """Plane x = 0 contains the focal axis; the weighted area there is
        pi l^2 log((b^2-1) a^2 / ((a^2-1) b^2)) with a, b the delay range."""
        base = random_general_scenario(0)
        sc = scenario_with_plane(base, PlaneCoeffs(1.0, 0.0, 0.0, 0.0))
        a, b = 1.5, 4.0
        got = weighted_area_general(sc, DelayRange(a, b))
        want = (
            math.pi
            * sc.l**2
            * math.log((b * b - 1.0) * a * a / ((a * a - 1.0) * b * b))
        )
        assert got == pytest.approx(want, rel=1e-8)
        # same plane rotated about the axis gives the same area
        sc2 = scenario_with_plane(base, PlaneCoeffs(0.0, 1.0, 0.0, 0.0))
        assert weighted_area_general(sc2, DelayRange(a, b)) == pytest.approx(
            got, rel=1e-10
        )

    def test_midplane_closed_form(self):
        """Complementary plane z = 0: area is pi l^2 (a^-2 - b^-2)."""
        base = random_complementary_scenario(0)
        sc = scenario_with_plane(base, PlaneCoeffs(0.0, 0.0, 1.0, 0.0))
        a, b = 1.2, 6.0
        got = weighted_area_complementary(sc, DelayRange(a, b))
        want = math.pi * sc.l**2 * (1.0 / a**2 - 1.0 / b**2)
        assert got == pytest.approx(want, rel=1e-10)

    def test_case_dispatch_errors(self):
        gen = random_general_scenario(1)
        comp = random_complementary_scenario(1)
        r = DelayRange(max(xi_sr(gen.plane), xi_sr(comp.plane)) + 0.5, 9.0)
        with pytest.raises(ValueError, match="general-case plane"):
            weighted_area_general(comp, r)
        with pytest.raises(ValueError, match="requires A = B = 0"):
            weighted_area_complementary(gen, r)
        assert issubclass(QuadratureError, RuntimeError)

    def test_range_below_specular_rejected(self):
        sc = aircraft_scenario()
        with pytest.raises(ValueError, match="specular delay"):
            weighted_area_general(sc, DelayRange(1.5, 9.0))


class TestLineDensity:
    def test_complementary_matches_circle_growth(self):
        """Independent check: dY/dxi equals w(xi) d/dxi of the in-plane
        circle area, evaluated by finite differences of the circle radius."""
        sc = random_complementary_scenario(2)
        d = abs(sc.plane.D / sc.plane.C)

        def circle_area(xi):
            eta_c = d / xi
            return math.pi * sc.l**2 * (xi * xi - 1.0) * (1.0 - eta_c * eta_c)

        for xi in (1.0 + d + 0.4, 2.0 + d, 5.0):
            h = 1e-6 * xi
            darea = (circle_area(xi + h) - circle_area(xi - h)) / (2.0 * h)
            eta_c = d / xi
            want = darea * weight(xi, eta_c)
            got = float(line_density_complementary(sc, [xi])[0])
            assert got == pytest.approx(want, rel=1e-9)

    def test_general_case_dense_phi_consistency(self):
        sc = random_general_scenario(3)
        xs = xi_sr(sc.plane) + np.array([0.3, 1.1, 2.9])
        coarse = line_density_general(sc, xs, n_phi=64)
        fine = line_density_general(sc, xs, n_phi=512)
        assert np.max(np.abs(coarse / fine - 1.0)) < 1e-10

    def test_dispatch(self):
        sc = random_complementary_scenario(2)
        xs = np.array([xi_sr(sc.plane) + 1.0])
        assert line_density(sc, xs) == pytest.approx(
            line_density_complementary(sc, xs)
        )

    def test_row_cf_nodes_total(self):
        sc = aircraft_scenario()
        for xi in (2.2, 4.0, 9.0):
            f, mass = row_cf_nodes(sc, xi)
            assert f.shape == mass.shape
            assert np.all(mass > 0.0)
            total = float(np.sum(mass))
            assert total == pytest.approx(
                float(line_density_general(sc, [xi])[0]), rel=1e-12
            )
            lo, hi = doppler_support(sc, xi)
            assert np.all(f >= lo - 1e-9)
            assert np.all(f <= hi + 1e-9)


class TestDelayPdf:
    def test_normalization_and_shape(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        grid = GridSpec("xi", r.xi_min, r.xi_max, 301)
        p = delay_pdf(sc, r, grid)
        vals = p.values.real
        assert np.all(np.abs(p.values.imag) == 0.0)
        assert np.all(vals >= 0.0)
        total = float(np.dot(vals, grid.cell_widths()))
        assert total == pytest.approx(1.0, abs=1e-14)
        # density decays with delay for this geometry
        assert vals[0] > vals[-1]

    def test_grid_must_stay_inside_range(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        with pytest.raises(ValueError, match="exceeds the delay range"):
            delay_pdf(sc, r, GridSpec("xi", r.xi_min - 0.1, r.xi_max, 51))


class TestDopplerSupport:
    def test_general_matches_branch_extremes(self):
        # sample eta through the arcsine map so the band edges, where the
        # branch values vary like a square root, are properly resolved
        sc = aircraft_scenario()
        xi = 3.0
        lo, hi = doppler_support(sc, xi)
        e1, e2 = eta_bounds(sc.plane, xi)
        phi = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 8193)
        etas = 0.5 * (e1 + e2) + 0.5 * (e2 - e1) * np.sin(phi)
        up = branch_doppler(sc, xi, etas, 1)
        dn = branch_doppler(sc, xi, etas, 2)
        assert float(hi[0]) == pytest.approx(float(np.max(up)), rel=1e-9)
        assert float(lo[0]) == pytest.approx(float(np.min(dn)), rel=1e-9)

    def test_complementary_support(self):
        sc = random_complementary_scenario(4)
        xi = xi_sr(sc.plane) + 1.3
        lo, hi = doppler_support(sc, xi)
        f_o, f_l = complementary_frequencies(sc, xi)
        assert float(lo[0]) == pytest.approx(f_o - f_l, rel=1e-12)
        assert float(hi[0]) == pytest.approx(f_o + f_l, rel=1e-12)


def aircraft_grids(n_xi=101, n_fd=161):
    r = aircraft_range()
    xi_grid = GridSpec("xi", r.xi_min, r.xi_max, n_xi)
    fd_grid = GridSpec("f_d", -120.0, 120.0, n_fd)
    return r, xi_grid, fd_grid


class TestJointPdf:
    def test_double_integral_is_one(self):
        sc = aircraft_scenario()
        r, xi_grid, fd_grid = aircraft_grids()
        p = joint_pdf(sc, r, xi_grid, fd_grid)
        total = float(
            xi_grid.cell_widths() @ p.values.real @ fd_grid.cell_widths()
        )
        assert total == pytest.approx(1.0, abs=1e-13)
        assert np.all(p.values.real >= 0.0)

    def test_row_totals_match_delay_pdf(self):
        sc = aircraft_scenario()
        r, xi_grid, fd_grid = aircraft_grids()
        p = joint_pdf(sc, r, xi_grid, fd_grid)
        marg = p.values.real @ fd_grid.cell_widths()
        pdf = delay_pdf(sc, r, xi_grid).values.real
        assert np.max(np.abs(marg - pdf)) < 1e-5 * np.max(pdf)

    def test_complementary_rows_are_arcsine(self):
        sc = random_complementary_scenario(5)
        lo = xi_sr(sc.plane) + 0.4
        r = DelayRange(lo, lo + 3.0)
        xi_grid = GridSpec("xi", r.xi_min, r.xi_max, 41)
        f_lo, f_hi = doppler_support(sc, xi_grid.points())
        span = float(np.max(np.abs([f_lo.min(), f_hi.max()]))) * 1.05
        fd_grid = GridSpec("f_d", -span, span, 801)
        p = joint_pdf(sc, r, xi_grid, fd_grid)
        # interior of one row against the arcsine shape
        xi = xi_grid.points()[20]
        f_o, f_l = complementary_frequencies(sc, xi)
        row = p.row_at(xi).real
        marg = float(row @ fd_grid.cell_widths())
        fd = fd_grid.points()
        inner = np.abs(fd - f_o) < 0.9 * f_l
        want = marg / (math.pi * np.sqrt(f_l**2 - (fd[inner] - f_o) ** 2))
        assert np.max(np.abs(row[inner] - want)) < 2e-3 * np.max(want)

    def test_static_scene_rejected(self):
        sc = aircraft_scenario()
        still = Scenario(
            l=sc.l, plane=sc.plane, v_t=(0.0,) * 3, v_r=(0.0,) * 3, f_c=sc.f_c, c=sc.c
        )
        r, xi_grid, fd_grid = aircraft_grids()
        with pytest.raises(ValueError, match="zero Doppler spread - use delay_pdf"):
            joint_pdf(still, r, xi_grid, fd_grid)

    def test_narrow_doppler_grid_rejected(self):
        sc = aircraft_scenario()
        r, xi_grid, _ = aircraft_grids()
        narrow = GridSpec("f_d", -50.0, 50.0, 41)
        with pytest.raises(ValueError, match="narrower than the Doppler support"):
            joint_pdf(sc, r, xi_grid, narrow)
        try:
            joint_pdf(sc, r, xi_grid, narrow)
        except ValueError as e:
            assert "required band" in str(e)
            assert "Hz" in str(e)


class TestJointCellProbabilities:
    def test_sums_to_one_and_converges(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        xi_grid = GridSpec("xi", r.xi_min, r.xi_max, 24)
        fd_grid = GridSpec("f_d", -120.0, 120.0, 18)
        cells = joint_cell_probabilities(sc, r, xi_grid, fd_grid)
        assert cells.shape == (24, 18)
        assert cells.sum() == pytest.approx(1.0, abs=1e-13)
        assert np.all(cells >= 0.0)
        # the xi refinement is converged at the default panel count
        fine = joint_cell_probabilities(sc, r, xi_grid, fd_grid, refine=256)
        assert np.abs(cells - fine).sum() < 1e-3

    def test_marginal_matches_integrated_delay_density(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        xi_grid = GridSpec("xi", r.xi_min, r.xi_max, 24)
        fd_grid = GridSpec("f_d", -120.0, 120.0, 18)
        cells = joint_cell_probabilities(sc, r, xi_grid, fd_grid)
        edges = xi_grid.cell_edges()
        masses = np.empty(xi_grid.n)
        for i in range(xi_grid.n):
            xs = np.linspace(edges[i], edges[i + 1], 65)
            masses[i] = np.trapezoid(line_density(sc, xs), xs)
        masses /= masses.sum()
        assert np.abs(cells.sum(axis=1) - masses).sum() < 1e-4

    def test_shares_validation(self):
        sc = aircraft_scenario()
        r = aircraft_range()
        xi_grid = GridSpec("xi", r.xi_min, r.xi_max, 8)
        with pytest.raises(ValueError, match="narrower than the Doppler support"):
            joint_cell_probabilities(sc, r, xi_grid, GridSpec("f_d", -5.0, 5.0, 6))
