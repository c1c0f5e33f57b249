"""Product pipeline: compute requested surfaces, export them, summarize.

Each product runs independently; a failure is recorded in the failure
manifest and the remaining products still run, so a partial output set
plus the manifest is always produced.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import density, io, mc, moments, transforms, util
from . import doppler as dop
from .config import RunConfig
from .geometry import xi_sr
from .surfaces import ComplexSurface, GridSpec

__all__ = ["run"]


def _export(surface: ComplexSurface, outdir: str, stem: str) -> None:
    io.export_surface(surface, os.path.join(outdir, stem + ".json"))
    io.export_surface(surface, os.path.join(outdir, stem + ".csv"))


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    va = np.concatenate([a.real.ravel(), a.imag.ravel()])
    vb = np.concatenate([b.real.ravel(), b.imag.ravel()])
    va = va - va.mean()
    vb = vb - vb.mean()
    denom = math.sqrt(float(va @ va) * float(vb @ vb))
    if denom == 0.0:
        return 0.0
    return float(va @ vb) / denom


def _l1_distance(emp: ComplexSurface, cell_prob: np.ndarray) -> float:
    """Total variation gap between an empirical density surface and the
    matching array of exact cell probabilities."""
    area = np.outer(emp.axes[0].cell_widths(), emp.axes[1].cell_widths())
    return float(np.sum(np.abs(emp.values.real * area - cell_prob)))


class _Products:
    """Product implementations sharing cached intermediate results."""

    def __init__(self, cfg: RunConfig, outdir: str):
        self.cfg = cfg
        self.outdir = outdir
        self.sc = cfg.scenario(0)
        self.r = cfg.delay
        self.summary: dict = {}
        self._joint = None
        self._r_surface = None

    def joint(self) -> ComplexSurface:
        if self._joint is None:
            self._joint = density.joint_pdf(
                self.sc, self.r, self.cfg.grids["xi"], self.cfg.grids["fd"]
            )
        return self._joint

    def r_surface(self) -> ComplexSurface:
        if self._r_surface is None:
            self._r_surface = transforms.joint_char(
                self.sc, self.r, self.cfg.grids["dftilde"], self.cfg.grids["dt"]
            )
        return self._r_surface

    # ------------------------------------------------------------------
    def product_joint_pdf(self) -> None:
        _export(self.joint(), self.outdir, "joint_pdf")

    def product_rho(self) -> None:
        if self.sc.plane.is_complementary:
            surf = transforms.hybrid_time_delay_complementary(
                self.sc, self.r, self.cfg.grids["xi"], self.cfg.grids["dt"]
            )
        else:
            surf = transforms.hybrid_time_delay(
                self.sc, self.r, self.cfg.grids["xi"], self.cfg.grids["dt"]
            )
        _export(surf, self.outdir, "rho")

    def product_varrho(self) -> None:
        surf = transforms.hybrid_freq_doppler(
            self.sc, self.r, self.cfg.grids["dftilde"], self.cfg.grids["fd"]
        )
        _export(surf, self.outdir, "varrho")

    def product_r(self) -> None:
        _export(self.r_surface(), self.outdir, "r")

    def product_marginals(self) -> None:
        p_xi = density.delay_pdf(self.sc, self.r, self.cfg.grids["xi"])
        _export(p_xi, self.outdir, "p_xi")
        joint = self.joint()
        cw = self.cfg.grids["xi"].cell_widths()
        p_fd = ComplexSurface(
            (self.cfg.grids["fd"],),
            cw @ joint.values,
            dict(joint.meta, function="doppler_marginal"),
        )
        _export(p_fd, self.outdir, "p_fd")

    def product_moments(self) -> None:
        rep = moments.conditional_doppler_moments(
            self.sc, self.r, self.cfg.grids["xi"]
        )
        io.write_json(
            {
                "mu_xi": rep.mu_xi,
                "sigma_xi": rep.sigma_xi,
                "cross_check_dev": rep.cross_check_dev,
                "xi": rep.xi,
                "mu_fd_given_xi": rep.mu_fd_given_xi,
                "sigma_fd_given_xi": rep.sigma_fd_given_xi,
            },
            os.path.join(self.outdir, "moments.json"),
        )
        self.summary["mu_xi"] = rep.mu_xi
        self.summary["sigma_xi"] = rep.sigma_xi

    def product_limits(self) -> None:
        _export(
            moments.jakes_limit_pdf(self.sc, self.cfg.grids["fd"]),
            self.outdir,
            "jakes_limit",
        )
        _export(
            moments.bessel_limit_cf(self.sc, self.cfg.grids["dt"]),
            self.outdir,
            "bessel_limit",
        )

    def product_coherence(self) -> None:
        surf = self.r_surface()
        xi_int = GridSpec("xi", self.r.xi_min, self.r.xi_max, 801)
        rows, totals = transforms._cf_rows(
            self.sc, xi_int.points(), np.array([0.0]), n_phi=64
        )
        norm = float(np.dot(totals, xi_int.cell_widths()))
        col0 = rows[:, 0] / norm

        def freq_re(dftilde: float) -> float:
            kern = transforms._filon_linear_kernel(xi_int, np.array([dftilde]))
            return float((kern @ col0).real[0])

        def time_re(dt: float) -> float:
            rws, _ = transforms._cf_rows(
                self.sc, xi_int.points(), np.array([dt]), n_phi=64
            )
            return float(np.dot(rws[:, 0], xi_int.cell_widths()).real / norm)

        met = moments.coherence_metrics(
            surf, self.sc.tau_los, freq_evaluator=freq_re, time_evaluator=time_re
        )
        self.summary["b_c_normalized"] = met.b_c_normalized
        self.summary["b_c_hz"] = met.b_c_hz
        self.summary["t_c_s"] = met.t_c_s

    def product_oracle(self) -> None:
        samp = mc.sample_scatterers(
            self.sc, self.r, self.cfg.oracle.samples, self.cfg.oracle.seed
        )
        xi_g = self.cfg.grids["xi"]
        fd_g = self.cfg.grids["fd"]
        emp = mc.empirical_surface(samp, xi_g, fd_g)
        _export(emp, self.outdir, "empirical")
        ref = density.joint_cell_probabilities(self.sc, self.r, xi_g, fd_g)
        self.summary["oracle_l1"] = _l1_distance(emp, ref)

    def product_conjecture_check(self) -> None:
        oc = self.cfg.oracle
        real = mc.synthesize_channel(
            self.sc, self.r, oc.scatterers, oc.duration, oc.time_step, oc.seed
        )
        n_t = len(real.times)
        m = min(32, max(n_t // 4, 2))
        dt_lags = GridSpec("dt", 0.0, (m - 1) * oc.time_step, m)
        dft_max = self.cfg.grids["dftilde"].max
        dftilde = GridSpec("dftilde", 0.0, dft_max, 32)
        df_hz = GridSpec("dfreq", 0.0, dft_max / self.sc.tau_los, 32)
        analytic = transforms.joint_char(self.sc, self.r, dftilde, dt_lags)
        est = mc.estimate_RL(real, dt_lags, df_hz)
        _export(est, self.outdir, "estimated_r")
        self.summary["conjecture_correlation"] = _pearson(
            est.values, analytic.values
        )

    def product_dc_family(self) -> None:
        surfaces = []
        times = []
        for idx, snap in enumerate(self.cfg.snapshots):
            sc = self.cfg.scenario(idx)
            if sc.plane.is_complementary:
                surf = transforms.hybrid_time_delay_complementary(
                    sc, self.r, self.cfg.grids["xi"], self.cfg.grids["dt"]
                )
            else:
                surf = transforms.hybrid_time_delay(
                    sc, self.r, self.cfg.grids["xi"], self.cfg.grids["dt"]
                )
            surfaces.append(surf)
            times.append(snap.t)
        stack = transforms.SnapshotStack(tuple(times), tuple(surfaces))
        family = transforms.temporal_fourier(stack)
        for k, (nu, surf) in enumerate(family):
            _export(surf, self.outdir, f"dc_family_{k}")
        self.summary["dc_family_frequencies_hz"] = [nu for nu, _ in family]


def run(cfg: RunConfig) -> dict:
    """Execute the configured products and write outputs plus summary.

    Returns the summary dictionary, which includes scalar diagnostics,
    the completed product list, and a failure manifest mapping product
    names to error strings.
    """
    outdir = util.output_dir_override() or cfg.output_dir
    os.makedirs(outdir, exist_ok=True)

    prods = _Products(cfg, outdir)
    sc = prods.sc
    f_l_inf = dop.limiting_frequency_inf(sc)
    prods.summary.update(
        {
            "xi_sr": xi_sr(sc.plane),
            "tau_los_s": sc.tau_los,
            "f_l_inf_hz": f_l_inf,
            "sigma_inf_hz": f_l_inf / math.sqrt(2.0),
        }
    )

    completed = []
    failures: dict[str, str] = {}
    for name in cfg.products:
        fn = getattr(prods, f"product_{name}")
        try:
            fn()
            completed.append(name)
        except Exception as exc:  # noqa: BLE001 - manifest records everything
            failures[name] = f"{type(exc).__name__}: {exc}"

    summary = dict(prods.summary)
    summary["products_completed"] = completed
    summary["failures"] = failures
    io.write_json(summary, os.path.join(outdir, "summary.json"))
    return summary
