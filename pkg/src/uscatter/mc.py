"""Monte Carlo oracle: scatterer sampling, empirical surfaces, and a
synthetic wideband channel with correlation estimators.

Scatterers live on the scattering plane, uniformly by area between the
two delay shells.  All statistical weighting happens at histogram or
synthesis time, never during sampling, so the same draw can back any
weighted quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import density
from . import doppler as dop
from .geometry import DelayRange, Scenario, psc_arrays_from_cartesian
from .surfaces import ComplexSurface, GridSpec, surface_meta

__all__ = [
    "ScattererSet",
    "ChannelRealization",
    "sample_scatterers",
    "empirical_surface",
    "synthesize_channel",
    "estimate_RL",
    "estimate_Ph",
]

_CHUNK = 1 << 18


@dataclass(frozen=True)
class ScattererSet:
    """Struct-of-arrays sample of plane scatterers.

    u, v are in-plane coordinates (meters) over the orthonormal plane
    basis; x, y, z the same points in the local frame.
    """

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    theta: np.ndarray
    w: np.ndarray
    tau: np.ndarray
    f_d: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.xi)


@dataclass(frozen=True)
class ChannelRealization:
    """Tapped-delay-line realization h[time, delay bin]."""

    times: np.ndarray
    delays: np.ndarray
    xi_bins: np.ndarray
    h: np.ndarray
    n_paths: int
    seed: int
    paths_per_bin: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _plane_frame(plane):
    """Orthonormal in-plane basis and the point of the plane nearest the
    origin, all in local coordinates scaled by l later."""
    n = plane.normal()
    seed = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(seed, n)
    if np.linalg.norm(e1) < 1e-12:
        e1 = np.array([1.0, 0.0, 0.0])
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def _outer_ellipse_box(sc: Scenario, xi_max: float):
    """Half-extents and center, in plane coordinates (u, v), of the conic
    cut by the scattering plane through the outer delay shell."""
    plane = sc.plane
    l = sc.l
    e1, e2 = _plane_frame(plane)
    n = plane.normal()
    p0 = l * plane.D * n
    a2 = l * l * (xi_max * xi_max - 1.0)
    c2 = l * l * xi_max * xi_max
    m = np.diag([1.0 / a2, 1.0 / a2, 1.0 / c2])
    basis = np.stack([e1, e2])
    mat = basis @ m @ basis.T
    b = basis @ m @ p0
    c0 = float(p0 @ m @ p0) - 1.0
    inv = np.linalg.inv(mat)
    center = -inv @ b
    k = float(b @ inv @ b) - c0
    if k <= 0.0:
        raise ValueError("degenerate region: plane misses the outer delay shell")
    half = np.sqrt(k * np.diag(inv))
    return e1, e2, p0, center, half


def sample_scatterers(sc: Scenario, r: DelayRange, n: int, seed: int) -> ScattererSet:
    """Draw n scatterers uniformly by plane area between the delay shells.

    Rejection sampling from the bounding box of the outer intersection
    ellipse.  Raises when the acceptance rate degenerates.
    """
    if n <= 0:
        raise ValueError("need a positive sample count")
    e1, e2, p0, center, half = _outer_ellipse_box(sc, r.xi_max)
    rng = np.random.default_rng(seed)
    l = sc.l
    chunks = []
    kept = 0
    proposed = 0
    while kept < n:
        u = rng.uniform(center[0] - half[0], center[0] + half[0], _CHUNK)
        v = rng.uniform(center[1] - half[1], center[1] + half[1], _CHUNK)
        proposed += _CHUNK
        pts = p0[None, :] + u[:, None] * e1[None, :] + v[:, None] * e2[None, :]
        xi, eta, _ = psc_arrays_from_cartesian(pts[:, 0], pts[:, 1], pts[:, 2], l)
        ok = (xi >= r.xi_min) & (xi <= r.xi_max)
        took = int(np.count_nonzero(ok))
        if took:
            chunks.append((u[ok], v[ok], pts[ok], xi[ok], eta[ok]))
            kept += took
        if proposed >= 4 * _CHUNK and kept / proposed < 1e-4:
            raise ValueError("degenerate region: acceptance rate below 1e-4")
    u = np.concatenate([c[0] for c in chunks])[:n]
    v = np.concatenate([c[1] for c in chunks])[:n]
    pts = np.concatenate([c[2] for c in chunks])[:n]
    xi = np.concatenate([c[3] for c in chunks])[:n]
    eta = np.concatenate([c[4] for c in chunks])[:n]
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    theta = np.mod(np.arctan2(y, x), 2.0 * math.pi)
    w = density.weight(xi, eta)
    dm = np.sqrt(x * x + y * y + (z + l) ** 2)
    dp = np.sqrt(x * x + y * y + (z - l) ** 2)
    tau = (dm + dp) / sc.c
    f_d = dop.doppler_values(sc, xi, eta, theta)
    return ScattererSet(
        u=u, v=v, x=x, y=y, z=z, xi=xi, eta=eta, theta=theta, w=w, tau=tau,
        f_d=f_d, seed=seed,
    )


def empirical_surface(
    samples: ScattererSet, xi_grid: GridSpec, fd_grid: GridSpec
) -> ComplexSurface:
    """Weighted histogram density over the node-centered grid cells.

    Cell sums times cell areas integrate to one exactly.
    """
    xe = xi_grid.cell_edges()
    fe = fd_grid.cell_edges()
    hist, _, _ = np.histogram2d(
        samples.xi, samples.f_d, bins=(xe, fe), weights=samples.w
    )
    total = hist.sum()
    if total <= 0.0:
        raise ValueError("no weighted samples fall inside the grid")
    area = np.outer(xi_grid.cell_widths(), fd_grid.cell_widths())
    vals = (hist / total / area).astype(complex)
    meta = {
        "function": "empirical_surface",
        "occupied_cells": int(np.count_nonzero(hist)),
        "n_samples": int(samples.n),
        "seed": int(samples.seed),
    }
    return ComplexSurface((xi_grid, fd_grid), vals, meta)


def synthesize_channel(
    sc: Scenario,
    r: DelayRange,
    k: int,
    duration: float,
    dt: float,
    seed: int,
    n_delay_bins: int = 64,
    phase_seed: int | None = None,
) -> ChannelRealization:
    """Sum-of-paths tapped delay line over a uniform time grid.

    Paths sit at sampled scatterer positions with power proportional to
    the plane weighting, independent uniform phases, and delays drifting
    at -f_d / f_c.  Each path phasor therefore rotates at +f_d.
    phase_seed decouples the phase draw from the position draw so the
    same scatterer set can be re-phased.
    """
    if k <= 0:
        raise ValueError("need at least one propagation path")
    if duration <= 0.0 or dt <= 0.0 or duration < 2.0 * dt:
        raise ValueError("record must cover at least two time samples")
    samples = sample_scatterers(sc, r, k, seed)
    rng = np.random.default_rng(seed + 1 if phase_seed is None else phase_seed)
    amp = np.sqrt(samples.w / samples.w.sum())
    phase = rng.uniform(0.0, 2.0 * math.pi, k)
    base = amp * np.exp(1j * phase) * np.exp(-2j * math.pi * sc.f_c * samples.tau)

    n_t = int(round(duration / dt))
    times = np.arange(n_t) * dt
    tau_min = 2.0 * sc.l * r.xi_min / sc.c
    tau_max = 2.0 * sc.l * r.xi_max / sc.c
    step = (tau_max - tau_min) / n_delay_bins
    centers = tau_min + (np.arange(n_delay_bins) + 0.5) * step
    bin0 = np.clip(((samples.tau - tau_min) / step).astype(int), 0, n_delay_bins - 1)

    slope = samples.f_d / sc.f_c
    h = np.zeros((n_t, n_delay_bins), dtype=complex)
    for i0 in range(0, n_t, 128):
        i1 = min(i0 + 128, n_t)
        t_blk = times[i0:i1]
        rot = base[None, :] * np.exp(2j * math.pi * np.outer(t_blk, samples.f_d))
        tau_t = samples.tau[None, :] - np.outer(t_blk, slope)
        idx = np.clip(((tau_t - tau_min) / step).astype(int), 0, n_delay_bins - 1)
        for j in range(i1 - i0):
            np.add.at(h[i0 + j], idx[j], rot[j])
    counts = np.bincount(bin0, minlength=n_delay_bins)
    xi_bins = centers * sc.c / (2.0 * sc.l)
    return ChannelRealization(
        times=times,
        delays=centers,
        xi_bins=xi_bins,
        h=h,
        n_paths=k,
        seed=seed,
        paths_per_bin=counts,
        meta={"scenario": sc.content_hash(), "f_c": sc.f_c},
    )


def _lag_index(real: ChannelRealization, lag: float) -> int:
    dt = real.dt
    s = lag / dt
    idx = int(round(s))
    if abs(s - idx) > 1e-6:
        raise ValueError(f"time lag {lag:.6g} s is not a multiple of the step")
    if idx < 0 or idx >= len(real.times):
        raise ValueError(f"lag beyond record: {lag:.6g} s")
    return idx


def estimate_RL(
    real: ChannelRealization,
    dt_lags: GridSpec,
    df_lags: GridSpec,
    n_comb: int = 128,
    comb_span: float | None = None,
) -> ComplexSurface:
    """Frequency-and-time averaged correlation of the transfer function.

    The realization is projected on a base frequency comb; for each
    frequency lag the comb and its shifted copy give paired transfer
    samples whose lagged products are averaged over comb position and
    time.  Normalized to one at the origin.  Axes: (frequency lag in Hz,
    time lag in s).
    """
    taus = real.delays
    if comb_span is None:
        span_hint = max(abs(df_lags.min), abs(df_lags.max))
        comb_span = max(4.0 * span_hint, 1.0 / (taus[1] - taus[0]) / 4.0)
    f_base = np.linspace(0.0, comb_span, n_comb)
    kern = np.exp(-2j * math.pi * np.outer(f_base, taus))
    h_base = real.h @ kern.T

    t_idx = [_lag_index(real, t) for t in dt_lags.points()]
    n_t = len(real.times)
    out = np.empty((df_lags.n, dt_lags.n), dtype=complex)
    for a, df in enumerate(df_lags.points()):
        if df == 0.0:
            h_shift = h_base
        else:
            kern2 = np.exp(-2j * math.pi * np.outer(f_base + df, taus))
            h_shift = real.h @ kern2.T
        for b, s in enumerate(t_idx):
            span = n_t - s
            prod = np.conj(h_base[:span]) * h_shift[s : s + span]
            out[a, b] = prod.mean()
    i0 = df_lags.index_of(0.0)
    j0 = dt_lags.index_of(0.0)
    origin = out[i0, j0]
    if abs(origin) == 0.0:
        raise ValueError("empty realization: zero power at the origin")
    vals = out / origin
    meta = {
        "function": "estimate_RL",
        "n_paths": float(real.n_paths),
        "seed": float(real.seed),
        "comb_points": float(n_comb),
        "comb_span_hz": float(comb_span),
    }
    return ComplexSurface((df_lags, dt_lags), vals, meta)


def estimate_Ph(real: ChannelRealization, dt_lags: GridSpec) -> ComplexSurface:
    """Per-delay-bin temporal autocorrelation, normalized at zero lag.

    Rows of bins that never carry power are zeroed; per-bin path counts
    ride along in the meta so callers can mask thin bins.
    """
    t_idx = [_lag_index(real, t) for t in dt_lags.points()]
    n_t, n_b = real.h.shape
    out = np.zeros((n_b, dt_lags.n), dtype=complex)
    power = np.sum(np.abs(real.h) ** 2, axis=0)
    occupied = power > 0.0
    for b, s in enumerate(t_idx):
        span = n_t - s
        num = np.sum(np.conj(real.h[:span]) * real.h[s : s + span], axis=0)
        denom = np.sum(np.abs(real.h[:span]) ** 2, axis=0)
        ok = occupied & (denom > 0.0)
        out[ok, b] = num[ok] / denom[ok]
    xi_axis = GridSpec("xi", float(real.xi_bins[0]), float(real.xi_bins[-1]), n_b)
    meta = {
        "function": "estimate_Ph",
        "n_paths": float(real.n_paths),
        "seed": float(real.seed),
        "paths_per_bin": [int(c) for c in real.paths_per_bin],
    }
    return ComplexSurface((xi_axis, dt_lags), out, meta)
