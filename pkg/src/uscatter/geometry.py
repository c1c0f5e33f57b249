"""Prolate spheroidal coordinates, scattering planes, and local frames.

The local frame places the transmitter focus at z = -l and the receiver
focus at z = +l, so the normalized delay of a scatterer at (xi, eta) is
xi itself (tau = 2 l xi / c).  A scattering plane A x + B y + C z = l D is
stored with the normal (A, B, C) scaled to unit length; every downstream
formula is homogeneous of degree zero in the four coefficients, so the
joint rescaling (and a joint sign flip) leaves all observables unchanged.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlaneCoeffs",
    "PscPoint",
    "Scenario",
    "DelayRange",
    "to_cartesian",
    "from_cartesian",
    "xi_sr",
    "eta_bounds",
    "band_quadratic_coeff",
    "band_residual",
    "build_local_scenario",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PlaneCoeffs:
    """Scattering plane A x + B y + C z = l D with unit normal (A, B, C).

    The complementary case (plane orthogonal to the focal axis) is
    classified exactly: A == 0 and B == 0.
    """

    A: float
    B: float
    C: float
    D: float

    def __post_init__(self) -> None:
        a, b, c, d = (float(self.A), float(self.B), float(self.C), float(self.D))
        if not all(math.isfinite(v) for v in (a, b, c, d)):
            raise ValueError("plane coefficients must be finite")
        norm = math.sqrt(a * a + b * b + c * c)
        if norm == 0.0:
            raise ValueError("plane normal (A, B, C) must be nonzero")
        object.__setattr__(self, "A", a / norm)
        object.__setattr__(self, "B", b / norm)
        object.__setattr__(self, "C", c / norm)
        object.__setattr__(self, "D", d / norm)

    @property
    def is_complementary(self) -> bool:
        return self.A == 0.0 and self.B == 0.0

    def normal(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C])

    def flipped(self) -> "PlaneCoeffs":
        """Same plane with all four coefficients negated."""
        return PlaneCoeffs(-self.A, -self.B, -self.C, -self.D)


@dataclass(frozen=True)
class PscPoint:
    """Point in prolate spheroidal coordinates (xi >= 1, |eta| <= 1)."""

    xi: float
    eta: float
    theta: float

    def __post_init__(self) -> None:
        if not (self.xi >= 1.0):
            raise ValueError(f"xi must be >= 1, got {self.xi}")
        if not (-1.0 <= self.eta <= 1.0):
            raise ValueError(f"eta must be in [-1, 1], got {self.eta}")
        object.__setattr__(self, "theta", float(self.theta) % _TWO_PI)


@dataclass(frozen=True)
class Scenario:
    """Frozen single-snapshot geometry in the local frame.

    l is the focus half-distance in meters; v_t and v_r are the
    transmitter and receiver velocities (m/s) expressed in the local
    frame; f_c the carrier frequency and c the propagation speed.
    """

    l: float
    plane: PlaneCoeffs
    v_t: tuple[float, float, float]
    v_r: tuple[float, float, float]
    f_c: float
    c: float = 299792458.0

    def __post_init__(self) -> None:
        if not (self.l > 0.0):
            raise ValueError("focus half-distance l must be > 0")
        if not (self.f_c > 0.0):
            raise ValueError("carrier frequency f_c must be > 0")
        if not (self.c > 0.0):
            raise ValueError("propagation speed c must be > 0")
        object.__setattr__(self, "v_t", tuple(float(v) for v in self.v_t))
        object.__setattr__(self, "v_r", tuple(float(v) for v in self.v_r))
        if len(self.v_t) != 3 or len(self.v_r) != 3:
            raise ValueError("velocities must be 3-vectors")

    @property
    def tau_los(self) -> float:
        """Line-of-sight propagation delay 2 l / c in seconds."""
        return 2.0 * self.l / self.c

    @property
    def is_static(self) -> bool:
        return all(v == 0.0 for v in self.v_t) and all(v == 0.0 for v in self.v_r)

    def content_hash(self) -> str:
        p = self.plane
        parts = [self.l, p.A, p.B, p.C, p.D, *self.v_t, *self.v_r, self.f_c, self.c]
        blob = ",".join(format(v, ".17g") for v in parts).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class DelayRange:
    """Validated normalized-delay interval (xi_min, xi_max)."""

    xi_min: float
    xi_max: float

    def __post_init__(self) -> None:
        if not (self.xi_max > self.xi_min):
            raise ValueError("require xi_max > xi_min")
        if not (self.xi_min > 1.0):
            raise ValueError("require xi_min > 1")

    def validate_for(self, plane: PlaneCoeffs) -> None:
        sr = xi_sr(plane)
        if not (self.xi_min > sr):
            raise ValueError(
                f"xi_min = {self.xi_min} must exceed the specular delay "
                f"xi_sr = {sr:.6g} of this plane"
            )


def to_cartesian(p: PscPoint, l: float) -> np.ndarray:
    """Map a prolate spheroidal point to local Cartesian coordinates."""
    if not (l > 0.0):
        raise ValueError("l must be > 0")
    rho = l * math.sqrt(max((p.xi**2 - 1.0) * (1.0 - p.eta**2), 0.0))
    return np.array(
        [rho * math.cos(p.theta), rho * math.sin(p.theta), l * p.xi * p.eta]
    )


def psc_arrays_from_cartesian(x, y, z, l: float):
    """Vectorized inverse map; returns (xi, eta, theta) arrays.

    xi is clipped to >= 1 and eta to [-1, 1] to absorb rounding at the
    focal axis.  theta is atan2(y, x) wrapped to [0, 2 pi), with the
    on-axis convention theta = 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    rho2 = x * x + y * y
    d_minus = np.sqrt(rho2 + (z + l) ** 2)
    d_plus = np.sqrt(rho2 + (z - l) ** 2)
    xi = np.maximum((d_minus + d_plus) / (2.0 * l), 1.0)
    eta = np.clip((d_minus - d_plus) / (2.0 * l), -1.0, 1.0)
    theta = np.mod(np.arctan2(y, x), _TWO_PI)
    return xi, eta, theta


def from_cartesian(v, l: float) -> PscPoint:
    """Inverse of to_cartesian for a single point."""
    if not (l > 0.0):
        raise ValueError("l must be > 0")
    v = np.asarray(v, dtype=float)
    xi, eta, theta = psc_arrays_from_cartesian(v[0], v[1], v[2], l)
    return PscPoint(float(xi), float(eta), float(theta))


def xi_sr(plane: PlaneCoeffs) -> float:
    """Normalized delay of the specular reflection on the plane."""
    val = math.sqrt(plane.A**2 + plane.B**2 + plane.D**2)
    return max(val, 1.0)


def band_quadratic_coeff(plane: PlaneCoeffs, xi) -> np.ndarray:
    """Leading coefficient K(xi) of the eta band quadratic (always > 0)."""
    ab2 = plane.A**2 + plane.B**2
    xi = np.asarray(xi, dtype=float)
    return ab2 * (xi * xi - 1.0) + plane.C**2 * xi * xi


def band_residual(plane: PlaneCoeffs, xi, eta):
    """R(eta) >= 0 exactly on the eta band of the plane section at xi.

    R(eta) = (A^2+B^2)(xi^2-1)(1-eta^2) - (D - C xi eta)^2, which equals
    K (eta2 - eta)(eta - eta1) between the band edges.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    ab2 = plane.A**2 + plane.B**2
    g = plane.D - plane.C * xi * eta
    return ab2 * (xi * xi - 1.0) * (1.0 - eta * eta) - g * g


def eta_bounds(plane: PlaneCoeffs, xi: float) -> tuple[float, float]:
    """Eta interval of the plane section of the xi spheroid (general case).

    Raises for complementary planes (the section is a full circle at a
    single eta there) and when the spheroid does not reach the plane.
    """
    if plane.is_complementary:
        raise ValueError("eta_bounds requires a general-case plane (A^2 + B^2 > 0)")
    ab2 = plane.A**2 + plane.B**2
    K = float(band_quadratic_coeff(plane, xi))
    disc = ab2 * (xi * xi - 1.0) * (K - plane.D**2)
    scale = max(K * K, 1.0)
    if disc < -1e-12 * scale:
        raise ValueError(f"no intersection at this xi (xi = {xi} <= xi_sr or invalid)")
    root = math.sqrt(max(disc, 0.0))
    mid = plane.C * plane.D * xi
    eta1 = (mid - root) / K
    eta2 = (mid + root) / K
    eta1 = min(max(eta1, -1.0), 1.0)
    eta2 = min(max(eta2, -1.0), 1.0)
    return eta1, eta2


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector")
    return v / n


def build_local_scenario(
    tx_pos,
    rx_pos,
    tx_vel,
    rx_vel,
    world_plane,
    f_c: float,
    c: float = 299792458.0,
) -> Scenario:
    """Construct the local-frame Scenario from world-frame inputs.

    world_plane is a pair (normal, offset) describing normal . x = offset
    in meters.  The local z axis points from TX to RX; the local y axis is
    the unit transverse part of the plane normal, oriented toward the
    plane, so the returned coefficients come out with D >= 0 (the
    remaining sign freedom is fixed by a joint flip, which no observable
    depends on).  Falls back to a fixed perpendicular when the plane
    normal is parallel to the link axis (complementary geometry).
    """
    tx = np.asarray(tx_pos, dtype=float)
    rx = np.asarray(rx_pos, dtype=float)
    n_w, offset = world_plane
    n_w = np.asarray(n_w, dtype=float)
    offset = float(offset)
    if np.linalg.norm(n_w) == 0.0:
        raise ValueError("plane normal must be nonzero")
    baseline = rx - tx
    length = float(np.linalg.norm(baseline))
    if length == 0.0:
        raise ValueError("tx_pos and rx_pos must differ")
    l = 0.5 * length
    origin = 0.5 * (tx + rx)
    z_hat = baseline / length

    # signed distance of each focus from the plane, in meters
    for focus, name in ((tx, "TX"), (rx, "RX")):
        dist = (float(np.dot(focus, n_w)) - offset) / float(np.linalg.norm(n_w))
        if abs(dist) < 1e-9 * max(l, 1.0):
            raise ValueError(f"focus on scattering plane ({name})")

    transverse = n_w - float(np.dot(n_w, z_hat)) * z_hat
    t_norm = float(np.linalg.norm(transverse))
    if t_norm > 1e-12 * float(np.linalg.norm(n_w)):
        side = offset - float(np.dot(n_w, origin))
        sigma = 1.0 if side >= 0.0 else -1.0
        y_hat = sigma * transverse / t_norm
        x_hat = np.cross(y_hat, z_hat)
    else:
        # complementary: any fixed perpendicular to the link axis
        seed = np.array([1.0, 0.0, 0.0])
        if abs(float(np.dot(seed, z_hat))) > 0.9:
            seed = np.array([0.0, 1.0, 0.0])
        x_hat = _unit(seed - float(np.dot(seed, z_hat)) * z_hat)
        y_hat = np.cross(z_hat, x_hat)

    rot = np.vstack([x_hat, y_hat, z_hat])
    n_local = rot @ n_w
    d_local = offset - float(np.dot(n_w, origin))
    plane = PlaneCoeffs(n_local[0], n_local[1], n_local[2], d_local / l)
    if plane.D < 0.0:
        plane = plane.flipped()

    v_t = rot @ np.asarray(tx_vel, dtype=float)
    v_r = rot @ np.asarray(rx_vel, dtype=float)
    return Scenario(
        l=l,
        plane=plane,
        v_t=tuple(v_t),
        v_r=tuple(v_r),
        f_c=float(f_c),
        c=float(c),
    )
