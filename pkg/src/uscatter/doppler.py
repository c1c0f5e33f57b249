"""Doppler frequencies of static plane scatterers seen from moving foci.

All frequencies follow the narrowband first-order convention
f_d = -(f_c / c) d/dt (d_t + d_r), i.e. positive when the total path
shrinks.  In prolate spheroidal coordinates this evaluates to

    f_d(xi, eta, theta) = (f_c / c) [X (P cos th + Q sin th) + Z] / (xi^2 - eta^2)

with X^2 = (xi^2 - 1)(1 - eta^2) and P, Q, Z linear in the velocity
components.  Restricting theta to the scattering plane collapses the
azimuth to two arcs and yields the two-branch form used by the density
machinery.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

from .geometry import PlaneCoeffs, PscPoint, Scenario, band_residual, eta_bounds

__all__ = [
    "DopplerBranch",
    "doppler_at",
    "doppler_cartesian",
    "branch_doppler",
    "branch_doppler_deriv",
    "complementary_frequencies",
    "limiting_frequency_inf",
    "parallel_projection",
]


class DopplerBranch(IntEnum):
    """Branch labels for the two azimuth arcs; UPPER carries the + sign."""

    UPPER = 1
    LOWER = 2


def _pqz(sc: Scenario, xi, eta):
    """The velocity-dependent polynomials P, Q, Z of the Doppler map."""
    vt, vr = sc.v_t, sc.v_r
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    wm = xi - eta  # scaled distance to the TX focus factor
    wp = xi + eta
    p = vt[0] * wm + vr[0] * wp
    q = vt[1] * wm + vr[1] * wp
    z = vt[2] * (xi * eta + 1.0) * wm + vr[2] * (xi * eta - 1.0) * wp
    return p, q, z


def _pqz_deta(sc: Scenario, xi, eta):
    """Partial derivatives of P, Q, Z with respect to eta."""
    vt, vr = sc.v_t, sc.v_r
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    dp = vr[0] - vt[0]
    dq = vr[1] - vt[1]
    dz = vt[2] * (xi * xi - 2.0 * xi * eta - 1.0) + vr[2] * (
        xi * xi + 2.0 * xi * eta - 1.0
    )
    return dp, dq, dz


def doppler_values(sc: Scenario, xi, eta, theta):
    """Vectorized instantaneous Doppler over (xi, eta, theta) arrays."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p, q, z = _pqz(sc, xi, eta)
    x2 = (xi * xi - 1.0) * (1.0 - eta * eta)
    big_x = np.sqrt(np.maximum(x2, 0.0))
    denom = xi * xi - eta * eta
    return (sc.f_c / sc.c) * (big_x * (p * np.cos(theta) + q * np.sin(theta)) + z) / denom


def doppler_at(sc: Scenario, p: PscPoint) -> float:
    """Instantaneous Doppler of a single scatterer point."""
    if p.xi == 1.0 and abs(p.eta) == 1.0:
        raise ValueError("Doppler undefined at focus")
    return float(doppler_values(sc, p.xi, p.eta, p.theta))


def doppler_cartesian(sc: Scenario, x, y, z):
    """Doppler from local Cartesian scatterer positions (vectorized).

    Computed directly from the unit vectors focus -> scatterer, which is
    the path-length time derivative with both foci in motion.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    l = sc.l
    d_t = np.sqrt(x * x + y * y + (z + l) ** 2)
    d_r = np.sqrt(x * x + y * y + (z - l) ** 2)
    vt, vr = sc.v_t, sc.v_r
    rate_t = (vt[0] * x + vt[1] * y + vt[2] * (z + l)) / d_t
    rate_r = (vr[0] * x + vr[1] * y + vr[2] * (z - l)) / d_r
    return (sc.f_c / sc.c) * (rate_t + rate_r)


def _branch_terms(sc: Scenario, xi, eta):
    plane = sc.plane
    ab2 = plane.A**2 + plane.B**2
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    p, q, z = _pqz(sc, xi, eta)
    g = plane.D - plane.C * xi * eta
    t = plane.A * q - plane.B * p
    s = np.sqrt(np.maximum(band_residual(plane, xi, eta), 0.0))
    base_num = g * (plane.A * p + plane.B * q) + ab2 * z
    denom = ab2 * (xi * xi - eta * eta)
    return base_num, t, s, denom


def branch_doppler(sc: Scenario, xi, eta, branch) -> float | np.ndarray:
    """Branch-resolved Doppler on the plane section (general case).

    Branch 1 (UPPER) takes the plus sign and is the larger of the two
    values everywhere; the branches coincide at the band edges.
    """
    plane = sc.plane
    if plane.is_complementary:
        raise ValueError("branch_doppler requires a general-case plane")
    branch = int(branch)
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    xi_arr = np.asarray(xi, dtype=float)
    eta_arr = np.asarray(eta, dtype=float)
    res = band_residual(plane, xi_arr, eta_arr)
    scale = np.maximum(plane.D**2, 1.0)
    if np.any(res < -1e-9 * scale):
        raise ValueError("off intersection: eta outside the band at this xi")
    base_num, t, s, denom = _branch_terms(sc, xi_arr, eta_arr)
    sign = 1.0 if branch == 1 else -1.0
    out = (sc.f_c / sc.c) * (base_num + sign * np.abs(t) * s) / denom
    return float(out) if np.isscalar(xi) and np.isscalar(eta) else out


def branch_doppler_deriv(sc: Scenario, xi: float, eta: float, branch) -> float:
    """d f_branch / d eta at an interior band point (closed form)."""
    plane = sc.plane
    if plane.is_complementary:
        raise ValueError("branch_doppler_deriv requires a general-case plane")
    branch = int(branch)
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    eta1, eta2 = eta_bounds(plane, xi)
    width = eta2 - eta1
    if not (eta1 + 1e-12 * width < eta < eta2 - 1e-12 * width):
        raise ValueError("derivative singular at band edge")
    ab2 = plane.A**2 + plane.B**2
    p, q, z = _pqz(sc, xi, eta)
    dp, dq, dz = _pqz_deta(sc, xi, eta)
    g = plane.D - plane.C * xi * eta
    dg = -plane.C * xi
    t = plane.A * q - plane.B * p
    dt = plane.A * dq - plane.B * dp
    res = float(band_residual(plane, xi, eta))
    s = np.sqrt(max(res, 0.0))
    if s == 0.0:
        raise ValueError("derivative singular at band edge")
    # d/deta of R = (A^2+B^2)(xi^2-1)(1-eta^2) - G^2
    dres = -2.0 * eta * ab2 * (xi * xi - 1.0) - 2.0 * g * dg
    ds = dres / (2.0 * s)
    sign = 1.0 if branch == 1 else -1.0
    tsign = 1.0 if t >= 0.0 else -1.0
    num = g * (plane.A * p + plane.B * q) + ab2 * z + sign * abs(t) * s
    dnum = (
        dg * (plane.A * p + plane.B * q)
        + g * (plane.A * dp + plane.B * dq)
        + ab2 * dz
        + sign * (tsign * dt * s + abs(t) * ds)
    )
    denom = ab2 * (xi * xi - eta * eta)
    ddenom = -2.0 * eta * ab2
    return (sc.f_c / sc.c) * (dnum * denom - num * ddenom) / denom**2


def complementary_eta(plane: PlaneCoeffs, xi) -> np.ndarray:
    """The single eta of the circular section in the complementary case."""
    if not plane.is_complementary:
        raise ValueError("plane is not complementary")
    return plane.D / (plane.C * np.asarray(xi, dtype=float))


def complementary_frequencies(sc: Scenario, xi) -> tuple:
    """Offset and limiting frequency (f_o, f_l) of the circular section.

    The Doppler over the section is exactly f_o + f_l cos(theta - theta0),
    so the support is [f_o - f_l, f_o + f_l].
    """
    plane = sc.plane
    if not plane.is_complementary:
        raise ValueError("complementary_frequencies requires A = B = 0")
    xi_arr = np.asarray(xi, dtype=float)
    eta_c = complementary_eta(plane, xi_arr)
    if np.any(np.abs(eta_c) > 1.0):
        raise ValueError("no intersection at this xi (below the specular delay)")
    p, q, z = _pqz(sc, xi_arr, eta_c)
    denom = xi_arr * xi_arr - eta_c * eta_c
    big_x = np.sqrt(np.maximum((xi_arr**2 - 1.0) * (1.0 - eta_c**2), 0.0))
    f_o = (sc.f_c / sc.c) * z / denom
    f_l = (sc.f_c / sc.c) * big_x * np.hypot(p, q) / denom
    if np.isscalar(xi):
        return float(f_o), float(f_l)
    return f_o, f_l


def parallel_projection(v, plane: PlaneCoeffs) -> np.ndarray:
    """Component of a velocity parallel to the scattering plane."""
    v = np.asarray(v, dtype=float)
    n = plane.normal()
    return v - float(np.dot(v, n)) * n


def limiting_frequency_inf(sc: Scenario) -> float:
    """Asymptotic maximum Doppler for far scatterers on the plane."""
    combined = parallel_projection(sc.v_t, sc.plane) + parallel_projection(
        sc.v_r, sc.plane
    )
    return float(np.linalg.norm(combined)) * sc.f_c / sc.c
