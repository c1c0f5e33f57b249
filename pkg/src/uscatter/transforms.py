"""Hybrid characteristic functions and the joint characteristic surface.

Sign conventions: the delay axis transforms forward,
F(df) = integral y(xi) exp(-j 2 pi df xi) dxi, and the Doppler axis
transforms inverse, G(dt) = integral p(f) exp(+j 2 pi f dt) df.  Both
operators are exact for their piecewise model of the integrand: the
delay direction uses a piecewise-linear (Filon) rule whose zero-lag
column reduces to the grid trapezoid, the Doppler direction integrates
cell-averaged masses with their exact in-cell phase factor.  That makes
the zero-lag identities (rho(xi, 0) = p(xi), varrho(0, f) = p(f),
r(0, 0) = 1) hold to machine precision on any grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from . import density
from . import doppler as dop
from .geometry import DelayRange, Scenario
from .surfaces import ComplexSurface, GridSpec, surface_meta

__all__ = [
    "SnapshotStack",
    "hybrid_time_delay",
    "hybrid_time_delay_complementary",
    "hybrid_freq_doppler",
    "joint_char",
    "conditional_normalize",
    "temporal_fourier",
    "delay_axis_transform",
    "doppler_axis_transform",
]

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# transform kernels


def _filon_linear_kernel(grid: GridSpec, dftilde: np.ndarray) -> np.ndarray:
    """Matrix K with K @ y = integral of the piecewise-linear interpolant
    of y over the grid against exp(-j 2 pi dftilde x)."""
    x = grid.points()
    step = grid.step
    theta = _TWO_PI * np.asarray(dftilde, dtype=float) * step
    # the closed forms cancel badly below theta ~ 1e-2; the series there
    # is accurate to well under 1e-16 relative
    small = np.abs(theta) < 0.02
    th = np.where(small, 1.0, theta)  # avoid 0/0; small branch uses series
    w_int = np.where(
        small,
        1.0 - theta**2 / 12.0 + theta**4 / 360.0 - theta**6 / 20160.0,
        2.0 * (1.0 - np.cos(th)) / th**2,
    )
    w_first = np.where(
        small,
        (0.5 - theta**2 / 24.0 + theta**4 / 720.0 - theta**6 / 40320.0)
        + 1j * (-theta / 6.0 + theta**3 / 120.0 - theta**5 / 5040.0),
        (1.0 - np.exp(-1j * th)) / th**2 - 1j / th,
    )
    phase = np.exp(-1j * _TWO_PI * np.outer(dftilde, x))
    kern = phase * (step * w_int)[:, None]
    kern[:, 0] = phase[:, 0] * step * w_first
    kern[:, -1] = phase[:, -1] * step * np.conj(w_first)
    return kern


def _cell_phase_kernel(fd_grid: GridSpec, dt: np.ndarray) -> np.ndarray:
    """Matrix K with y @ K.T the inverse transform of cell-averaged
    densities y over the node-centered Doppler cells."""
    edges = fd_grid.cell_edges()
    centers = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    omega = _TWO_PI * np.asarray(dt, dtype=float)
    phase = np.exp(1j * np.outer(omega, centers))
    spread = np.sinc(np.outer(omega, widths) / (2.0 * math.pi))
    return phase * spread * widths[None, :]


def delay_axis_transform(surface: ComplexSurface, dftilde_grid: GridSpec) -> ComplexSurface:
    """Forward transform of axis 0 (a xi axis) of a surface."""
    if surface.ndim != 2:
        raise ValueError("expected a 2-D surface")
    xi_axis = surface.axes[0]
    _check_nyquist(xi_axis, dftilde_grid)
    kern = _filon_linear_kernel(xi_axis, dftilde_grid.points())
    vals = kern @ surface.values
    meta = dict(surface.meta)
    meta["function"] = meta.get("function", "") + ">delay_axis_transform"
    return ComplexSurface((dftilde_grid, surface.axes[1]), vals, meta)


def doppler_axis_transform(surface: ComplexSurface, dt_grid: GridSpec) -> ComplexSurface:
    """Inverse transform of axis 1 (a Doppler-density axis) of a surface."""
    if surface.ndim != 2:
        raise ValueError("expected a 2-D surface")
    kern = _cell_phase_kernel(surface.axes[1], dt_grid.points())
    vals = surface.values @ kern.T
    meta = dict(surface.meta)
    meta["function"] = meta.get("function", "") + ">doppler_axis_transform"
    return ComplexSurface((surface.axes[0], dt_grid), vals, meta)


def _check_nyquist(xi_grid: GridSpec, dftilde_grid: GridSpec) -> None:
    limit = 0.5 / xi_grid.step
    worst = max(abs(dftilde_grid.min), abs(dftilde_grid.max))
    if worst > limit * (1.0 + 1e-12):
        raise ValueError(
            f"xi grid too coarse for requested dftilde: |dftilde| <= {limit:.6g} "
            f"supported at step {xi_grid.step:.6g}, requested {worst:.6g}"
        )


# ---------------------------------------------------------------------------
# hybrid characteristic surfaces


def _cf_rows(sc: Scenario, xi_pts: np.ndarray, dt: np.ndarray, n_phi: int):
    """Unnormalized conditional characteristic rows and the row totals."""
    rows = np.empty((len(xi_pts), len(dt)), dtype=complex)
    totals = np.empty(len(xi_pts))
    if sc.plane.is_complementary:
        f_o, f_l = dop.complementary_frequencies(sc, xi_pts)
        dens = density.line_density_complementary(sc, xi_pts)
        rows[:] = (
            dens[:, None]
            * j0(_TWO_PI * np.outer(f_l, dt))
            * np.exp(1j * _TWO_PI * np.outer(f_o, dt))
        )
        totals[:] = dens
        return rows, totals
    for i, xi in enumerate(xi_pts):
        f_nodes, masses = density.row_cf_nodes(sc, float(xi), n_phi)
        rows[i] = np.exp(1j * _TWO_PI * np.outer(dt, f_nodes)) @ masses
        totals[i] = masses.sum()
    return rows, totals


def hybrid_time_delay(
    sc: Scenario, r: DelayRange, xi_grid: GridSpec, dt_grid: GridSpec, n_phi: int = 64
) -> ComplexSurface:
    """rho(xi, dt): per-delay characteristic rows of the weighted density.

    General case; the complementary closed form lives in
    hybrid_time_delay_complementary.  The dt = 0 column equals delay_pdf.
    """
    if sc.plane.is_complementary:
        raise ValueError("use hybrid_time_delay_complementary for A = B = 0 planes")
    density._validate_xi_grid(sc, r, xi_grid)
    pts = xi_grid.points()
    rows, totals = _cf_rows(sc, pts, dt_grid.points(), n_phi)
    norm = float(np.dot(totals, xi_grid.cell_widths()))
    return ComplexSurface(
        (xi_grid, dt_grid), rows / norm, surface_meta(sc, "hybrid_time_delay")
    )


def hybrid_time_delay_complementary(
    sc: Scenario, r: DelayRange, xi_grid: GridSpec, dt_grid: GridSpec
) -> ComplexSurface:
    """Closed-form rho(xi, dt) for circular sections: arcsine rows give a
    Bessel envelope at the limiting frequency times the offset phasor."""
    if not sc.plane.is_complementary:
        raise ValueError("hybrid_time_delay_complementary requires A = B = 0")
    density._validate_xi_grid(sc, r, xi_grid)
    pts = xi_grid.points()
    rows, totals = _cf_rows(sc, pts, dt_grid.points(), n_phi=0)
    norm = float(np.dot(totals, xi_grid.cell_widths()))
    return ComplexSurface(
        (xi_grid, dt_grid),
        rows / norm,
        surface_meta(sc, "hybrid_time_delay_complementary"),
    )


def hybrid_freq_doppler(
    sc: Scenario,
    r: DelayRange,
    dftilde_grid: GridSpec,
    fd_grid: GridSpec,
    xi_points: int = 1024,
) -> ComplexSurface:
    """varrho(dftilde, f_d): forward delay transform of the joint density.

    Evaluated on an internal fine xi grid spanning the delay range; the
    dftilde = 0 row is the Doppler marginal of that density.
    """
    xi_grid = GridSpec("xi", r.xi_min, r.xi_max, int(xi_points))
    _check_nyquist(xi_grid, dftilde_grid)
    masses = density.joint_cell_masses(sc, r, xi_grid, fd_grid)
    z = float(np.dot(masses.sum(axis=1), xi_grid.cell_widths()))
    dens = masses / (z * fd_grid.cell_widths()[None, :])
    kern = _filon_linear_kernel(xi_grid, dftilde_grid.points())
    vals = kern @ dens
    return ComplexSurface(
        (dftilde_grid, fd_grid), vals, surface_meta(sc, "hybrid_freq_doppler")
    )


def joint_char(
    sc: Scenario,
    r: DelayRange,
    dftilde_grid: GridSpec,
    dt_grid: GridSpec,
    xi_points: int = 801,
    n_phi: int = 64,
) -> ComplexSurface:
    """r(dftilde, dt): the joint characteristic surface.

    Evaluated as the exact per-delay characteristic rows on an internal
    fine xi grid followed by the forward Filon transform in xi, which is
    the mixed-sign double transform of the weighted density with the
    Doppler integral done in closed quadrature.  r(0, 0) = 1 exactly.
    """
    xi_grid = GridSpec("xi", r.xi_min, r.xi_max, int(xi_points))
    _check_nyquist(xi_grid, dftilde_grid)
    density._validate_xi_grid(sc, r, xi_grid)
    pts = xi_grid.points()
    rows, totals = _cf_rows(sc, pts, dt_grid.points(), n_phi)
    norm = float(np.dot(totals, xi_grid.cell_widths()))
    kern = _filon_linear_kernel(xi_grid, dftilde_grid.points())
    vals = kern @ (rows / norm)
    return ComplexSurface(
        (dftilde_grid, dt_grid), vals, surface_meta(sc, "joint_char")
    )


# ---------------------------------------------------------------------------
# conditioning and snapshot stacks


def conditional_normalize(surface: ComplexSurface, axis: int) -> ComplexSurface:
    """Divide lines of the surface by their zero-lag value.

    axis names the lag axis that contains the zero node: axis = 1
    normalizes every axis-0 row by its value at lag zero, axis = 0
    normalizes every column.  Idempotent.
    """
    if surface.ndim != 2:
        raise ValueError("conditional_normalize expects a 2-D surface")
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    lag_axis = surface.axes[axis]
    zero_idx = lag_axis.index_of(0.0)
    if axis == 1:
        norm = surface.values[:, zero_idx]
    else:
        norm = surface.values[zero_idx, :]
    floor = 1e-12 * float(np.abs(surface.values).max())
    bad = np.nonzero(np.abs(norm) <= floor)[0]
    if bad.size:
        other = surface.axes[1 - axis]
        where = ", ".join(f"{other.name}={other.points()[i]:.6g}" for i in bad[:8])
        raise ValueError(f"zero-lag normalizer vanishes at: {where}")
    vals = surface.values / (norm[:, None] if axis == 1 else norm[None, :])
    meta = dict(surface.meta)
    meta["function"] = meta.get("function", "") + ">conditional"
    return ComplexSurface(surface.axes, vals, meta)


@dataclass(frozen=True)
class SnapshotStack:
    """Time-ordered surfaces on a shared grid with a uniform time step."""

    times: tuple[float, ...]
    surfaces: tuple[ComplexSurface, ...]

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.times)
        surfaces = tuple(self.surfaces)
        if len(times) < 2 or len(times) != len(surfaces):
            raise ValueError("a stack needs >= 2 time-stamped surfaces")
        steps = np.diff(times)
        if np.any(steps <= 0.0):
            raise ValueError("snapshot times must increase")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
            raise ValueError("snapshot times must be uniformly spaced")
        first = surfaces[0].axes
        for s in surfaces[1:]:
            if s.axes != first:
                raise ValueError("all snapshots must share the same axes")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "surfaces", surfaces)

    @property
    def step(self) -> float:
        return self.times[1] - self.times[0]

    @property
    def duration(self) -> float:
        return len(self.times) * self.step


def temporal_fourier(stack: SnapshotStack) -> list[tuple[float, ComplexSurface]]:
    """Discrete Fourier family of the stack along the snapshot axis.

    Returns (frequency, surface) pairs on the DFT frequency grid; the
    zero-frequency slice equals the temporal mean times the duration.
    """
    n = len(stack.times)
    step = stack.step
    freqs = np.fft.fftshift(np.fft.fftfreq(n, d=step))
    t = np.asarray(stack.times)
    cube = np.stack([s.values for s in stack.surfaces])
    out = []
    for nu in freqs:
        phases = np.exp(-1j * _TWO_PI * nu * t)
        vals = step * np.tensordot(phases, cube, axes=(0, 0))
        meta = dict(stack.surfaces[0].meta)
        meta["function"] = meta.get("function", "") + ">temporal_fourier"
        meta["doppler_lag_hz"] = float(nu)
        out.append((float(nu), ComplexSurface(stack.surfaces[0].axes, vals, meta)))
    return out
