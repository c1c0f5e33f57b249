"""Path-loss weighting, weighted section areas, and delay-Doppler densities.

The eta integral over a plane section carries inverse square-root
endpoint singularities.  Substituting eta = m + h sin(phi) with m, h the
band midpoint and half-width turns the band residual into
R = K h^2 cos^2(phi), so every integrand used here is smooth in phi and
plain Gauss-Legendre quadrature applies.  In the phi variable the
weighted surface measure of one azimuth arc is

    w dS = l^2 / ((xi^2 - eta^2) sqrt(K)) dphi dxi

and the Doppler along an arc is a smooth trigonometric expression, so
per-cell Doppler masses can be accumulated exactly by cumulative
integration in phi, which keeps every grid normalization identity
structural instead of approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from . import doppler as dop
from .geometry import DelayRange, Scenario, band_quadratic_coeff, eta_bounds
from .surfaces import ComplexSurface, GridSpec, surface_meta
from .util import parallel_map

__all__ = [
    "weight",
    "weighted_area_general",
    "weighted_area_complementary",
    "delay_pdf",
    "joint_pdf",
    "joint_cell_probabilities",
    "doppler_support",
    "QuadratureError",
]

_HALF_PI = 0.5 * math.pi


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested accuracy."""


def weight(xi, eta):
    """Two-hop path-loss weight w = 1 / (xi^2 - eta^2)^2."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    denom = xi * xi - eta * eta
    if np.any(denom <= 0.0):
        raise ValueError("weight undefined on the focus line xi = |eta|")
    out = 1.0 / (denom * denom)
    return float(out) if out.ndim == 0 else out


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _phi_gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [-pi/2, pi/2]."""
    if n not in _GL_CACHE:
        x, w = leggauss(n)
        _GL_CACHE[n] = (_HALF_PI * x, _HALF_PI * w)
    return _GL_CACHE[n]


@dataclass(frozen=True)
class _Band:
    xi: float
    eta1: float
    eta2: float
    mid: float
    half: float
    rootk: float


def _band(sc: Scenario, xi: float) -> _Band:
    eta1, eta2 = eta_bounds(sc.plane, xi)
    k = float(band_quadratic_coeff(sc.plane, xi))
    return _Band(xi, eta1, eta2, 0.5 * (eta1 + eta2), 0.5 * (eta2 - eta1), math.sqrt(k))


def _arc_doppler_phi(sc: Scenario, band: _Band, arc: float, phi: np.ndarray):
    """Doppler along one azimuth arc as a smooth function of phi."""
    plane = sc.plane
    ab2 = plane.A**2 + plane.B**2
    xi = band.xi
    eta = band.mid + band.half * np.sin(phi)
    s = band.rootk * band.half * np.cos(phi)  # sqrt of the band residual
    p, q, z = dop._pqz(sc, xi, eta)
    g = plane.D - plane.C * xi * eta
    t = plane.A * q - plane.B * p
    num = g * (plane.A * p + plane.B * q) + arc * t * s + ab2 * z
    den = ab2 * (xi * xi - eta * eta)
    return (sc.f_c / sc.c) * num / den, eta


def _arc_weight_phi(sc: Scenario, band: _Band, eta: np.ndarray) -> np.ndarray:
    """Weighted surface measure per unit phi for one arc."""
    return sc.l**2 / ((band.xi**2 - eta * eta) * band.rootk)


def line_density_general(sc: Scenario, xi_values, n_phi: int = 64) -> np.ndarray:
    """Weighted length density dY/dxi for a general-case plane (both arcs)."""
    phi, w = _phi_gl(n_phi)
    out = np.empty(len(xi_values))
    for i, xi in enumerate(xi_values):
        band = _band(sc, float(xi))
        eta = band.mid + band.half * np.sin(phi)
        out[i] = 2.0 * float(np.dot(w, _arc_weight_phi(sc, band, eta)))
    return out


def line_density_complementary(sc: Scenario, xi_values) -> np.ndarray:
    """Weighted length density for a complementary plane (full circles)."""
    plane = sc.plane
    xi = np.asarray(xi_values, dtype=float)
    eta_c = dop.complementary_eta(plane, xi)
    if np.any(np.abs(eta_c) >= 1.0):
        raise ValueError("delay range dips below the specular delay")
    return 2.0 * math.pi * sc.l**2 / (xi * (xi * xi - eta_c * eta_c))


def line_density(sc: Scenario, xi_values, n_phi: int = 64) -> np.ndarray:
    if sc.plane.is_complementary:
        return line_density_complementary(sc, xi_values)
    return line_density_general(sc, xi_values, n_phi)


def row_cf_nodes(sc: Scenario, xi: float, n_phi: int = 64):
    """Doppler nodes and weighted masses of one delay row (both arcs).

    Returns (f, mass) arrays sized 2 n_phi such that sums of
    mass * fn(f) are Gauss-Legendre quadratures of the weighted row
    integral of fn over the section.  Used for characteristic functions
    and conditional moments; general case only.
    """
    phi, w = _phi_gl(n_phi)
    band = _band(sc, xi)
    f_up, eta = _arc_doppler_phi(sc, band, +1.0, phi)
    f_dn, _ = _arc_doppler_phi(sc, band, -1.0, phi)
    gw = w * _arc_weight_phi(sc, band, eta)
    return np.concatenate([f_up, f_dn]), np.concatenate([gw, gw])


def weighted_area_general(sc: Scenario, r: DelayRange, quad_tol: float = 1e-8) -> float:
    """Weighted area Y of the general-case section annulus.

    Outer xi integral by adaptive quadrature, inner arc integral by
    Gauss-Legendre in phi; raises QuadratureError when the requested
    relative tolerance is not certified.
    """
    if sc.plane.is_complementary:
        raise ValueError("weighted_area_general requires a general-case plane")
    r.validate_for(sc.plane)

    def integrand(xi: float) -> float:
        return float(line_density_general(sc, [xi])[0])

    val, err = integrate.quad(
        integrand, r.xi_min, r.xi_max, epsabs=0.0, epsrel=quad_tol, limit=200
    )
    if val != 0.0 and err > 10.0 * quad_tol * abs(val):
        raise QuadratureError(
            f"weighted area quadrature achieved {err / abs(val):.3e} relative error"
        )
    return val


def weighted_area_complementary(sc: Scenario, r: DelayRange) -> float:
    """Weighted area of the complementary-case annulus (circles stack)."""
    if not sc.plane.is_complementary:
        raise ValueError("weighted_area_complementary requires A = B = 0")
    r.validate_for(sc.plane)

    def integrand(xi: float) -> float:
        return float(line_density_complementary(sc, [xi])[0])

    val, err = integrate.quad(
        integrand, r.xi_min, r.xi_max, epsabs=0.0, epsrel=1e-10, limit=200
    )
    if val != 0.0 and err > 1e-9 * abs(val):
        raise QuadratureError(
            f"weighted area quadrature achieved {err / abs(val):.3e} relative error"
        )
    return val


def _validate_xi_grid(sc: Scenario, r: DelayRange, xi_grid: GridSpec) -> None:
    r.validate_for(sc.plane)
    if xi_grid.min < r.xi_min - 1e-12 or xi_grid.max > r.xi_max + 1e-12:
        raise ValueError(
            f"xi grid [{xi_grid.min}, {xi_grid.max}] exceeds the delay range "
            f"[{r.xi_min}, {r.xi_max}]"
        )


def delay_pdf(sc: Scenario, r: DelayRange, xi_grid: GridSpec) -> ComplexSurface:
    """Normalized delay density p(xi) on the grid (integrates to 1 exactly
    under the grid trapezoid rule)."""
    _validate_xi_grid(sc, r, xi_grid)
    pts = xi_grid.points()
    dens = line_density(sc, pts)
    norm = float(np.dot(dens, xi_grid.cell_widths()))
    vals = (dens / norm).astype(complex)
    return ComplexSurface((xi_grid,), vals, surface_meta(sc, "delay_pdf"))


def _arc_segments(f: np.ndarray):
    """Split a sampled arc into index ranges on which f is monotone."""
    df = np.diff(f)
    sign = np.sign(df)
    # treat zero slopes as continuation of the previous direction
    for i in range(1, len(sign)):
        if sign[i] == 0.0:
            sign[i] = sign[i - 1]
    breaks = np.nonzero(sign[1:] * sign[:-1] < 0.0)[0] + 1
    idx = np.concatenate([[0], breaks, [len(f) - 1]])
    return [(int(a), int(b)) for a, b in zip(idx[:-1], idx[1:]) if b > a]


def _row_cell_masses_general(
    sc: Scenario, xi: float, edges: np.ndarray, n_dense: int = 1025
) -> np.ndarray:
    """Doppler cell masses of one delay row by cumulative phi integration.

    The returned vector sums exactly to the trapezoid row total, so the
    joint density built from it keeps its normalization identities to
    machine precision.
    """
    band = _band(sc, xi)
    phi = np.linspace(-_HALF_PI, _HALF_PI, n_dense)
    masses = np.zeros(len(edges) - 1)
    for arc in (+1.0, -1.0):
        f, eta = _arc_doppler_phi(sc, band, arc, phi)
        gw = _arc_weight_phi(sc, band, eta)
        inc = 0.5 * (gw[1:] + gw[:-1]) * np.diff(phi)
        cum = np.concatenate([[0.0], np.cumsum(inc)])
        for a, b in _arc_segments(f):
            f_seg = f[a : b + 1]
            w_seg = cum[a : b + 1]
            if f_seg[-1] < f_seg[0]:
                # mass below a Doppler value accumulates from the far end
                f_seg = f_seg[::-1]
                w_seg = (cum[b] - w_seg)[::-1]
            else:
                w_seg = w_seg - cum[a]
            f_seg = np.maximum.accumulate(f_seg)
            at_edges = np.interp(edges, f_seg, w_seg)
            masses += np.diff(at_edges)
    return masses


def _row_cell_masses_complementary(
    sc: Scenario, xi: float, edges: np.ndarray
) -> np.ndarray:
    """Arcsine cell masses of a circular section row (closed form)."""
    f_o, f_l = dop.complementary_frequencies(sc, xi)
    total = float(line_density_complementary(sc, [xi])[0])
    if f_l == 0.0:
        masses = np.zeros(len(edges) - 1)
        k = int(np.clip(np.searchsorted(edges, f_o) - 1, 0, len(edges) - 2))
        masses[k] = total
        return masses
    u = np.clip((edges - f_o) / f_l, -1.0, 1.0)
    cdf = (np.arcsin(u) + _HALF_PI) / math.pi
    return total * np.diff(cdf)


def doppler_support(sc: Scenario, xi_values, n_dense: int = 1025):
    """Doppler band [f_min, f_max] per delay value (either plane case)."""
    xi_values = np.atleast_1d(np.asarray(xi_values, dtype=float))
    lo = np.empty(len(xi_values))
    hi = np.empty(len(xi_values))
    if sc.plane.is_complementary:
        f_o, f_l = dop.complementary_frequencies(sc, xi_values)
        return f_o - f_l, f_o + f_l
    phi = np.linspace(-_HALF_PI, _HALF_PI, n_dense)
    for i, xi in enumerate(xi_values):
        band = _band(sc, float(xi))
        f_up, _ = _arc_doppler_phi(sc, band, +1.0, phi)
        f_dn, _ = _arc_doppler_phi(sc, band, -1.0, phi)
        lo[i] = min(f_up.min(), f_dn.min())
        hi[i] = max(f_up.max(), f_dn.max())
    return lo, hi


def _check_doppler_coverage(sc: Scenario, xi_pts, fd_grid: GridSpec) -> None:
    lo, hi = doppler_support(sc, xi_pts)
    f_lo, f_hi = float(np.min(lo)), float(np.max(hi))
    margin = 1e-9 * max(abs(f_lo), abs(f_hi), 1.0)
    if f_lo < fd_grid.min - margin or f_hi > fd_grid.max + margin:
        raise ValueError(
            "f_d grid narrower than the Doppler support; required band "
            f"[{f_lo:.6g}, {f_hi:.6g}] Hz, grid covers "
            f"[{fd_grid.min:.6g}, {fd_grid.max:.6g}] Hz"
        )


def _check_not_degenerate(sc: Scenario, xi_pts) -> None:
    if sc.is_static:
        raise ValueError("zero Doppler spread - use delay_pdf")
    if sc.plane.is_complementary:
        _, f_l = dop.complementary_frequencies(sc, np.asarray(xi_pts))
        if np.max(f_l) == 0.0:
            raise ValueError("zero Doppler spread - use delay_pdf")


def joint_cell_masses(
    sc: Scenario, r: DelayRange, xi_grid: GridSpec, fd_grid: GridSpec
) -> np.ndarray:
    """Matrix of per-node Doppler cell masses over the xi grid rows."""
    _validate_xi_grid(sc, r, xi_grid)
    pts = xi_grid.points()
    _check_not_degenerate(sc, pts)
    _check_doppler_coverage(sc, pts, fd_grid)
    edges = fd_grid.cell_edges()
    if sc.plane.is_complementary:
        rows = parallel_map(
            lambda xi: _row_cell_masses_complementary(sc, float(xi), edges), pts
        )
    else:
        rows = parallel_map(
            lambda xi: _row_cell_masses_general(sc, float(xi), edges), pts
        )
    return np.vstack(rows)


def joint_cell_probabilities(
    sc: Scenario,
    r: DelayRange,
    xi_grid: GridSpec,
    fd_grid: GridSpec,
    refine: int = 64,
) -> np.ndarray:
    """Exact probability mass of every node-centered grid cell.

    This is the expectation of a weighted sample histogram on the same
    cells: each xi cell is integrated with `refine` trapezoid panels, so
    the result is cell-averaged in both directions (unlike joint_pdf,
    whose xi direction is a node sampling).  Sums to 1.
    """
    _validate_xi_grid(sc, r, xi_grid)
    xe = xi_grid.cell_edges()
    fe = fd_grid.cell_edges()
    _check_not_degenerate(sc, xi_grid.points())
    _check_doppler_coverage(sc, xi_grid.points(), fd_grid)

    def one_cell(i: int) -> np.ndarray:
        fine = np.linspace(xe[i], xe[i + 1], refine + 1)
        if sc.plane.is_complementary:
            rows = [_row_cell_masses_complementary(sc, float(x), fe) for x in fine]
        else:
            rows = [_row_cell_masses_general(sc, float(x), fe) for x in fine]
        return np.trapezoid(np.vstack(rows), fine, axis=0)

    cells = np.vstack(parallel_map(one_cell, range(xi_grid.n)))
    return cells / cells.sum()


def joint_pdf(
    sc: Scenario, r: DelayRange, xi_grid: GridSpec, fd_grid: GridSpec
) -> ComplexSurface:
    """Joint delay-Doppler density p(xi, f_d) on the grid.

    Doppler-direction values are cell averages over the node-centered
    cells (the band-edge singularities are integrable, and averaging is
    what keeps the grid quadrature normalized); the xi direction is a
    node sampling.  The grid double integral equals 1 exactly.
    """
    masses = joint_cell_masses(sc, r, xi_grid, fd_grid)
    z = float(np.dot(masses.sum(axis=1), xi_grid.cell_widths()))
    if z <= 0.0:
        raise ValueError("degenerate density: zero total mass")
    vals = masses / (z * fd_grid.cell_widths()[None, :])
    return ComplexSurface(
        (xi_grid, fd_grid), vals.astype(complex), surface_meta(sc, "joint_pdf")
    )
