"""Run configuration: INI parsing, validation, scenario construction.

Sections:

  [world]       plane_normal, plane_offset, f_c, and optionally c
  [snapshot.N]  t, tx_pos, tx_vel, rx_pos, rx_vel (world coordinates)
  [delay]       xi_min, xi_max
  [grid.NAME]   min, max, n for NAME in xi, fd, dt, dftilde
  [oracle]      samples, scatterers, seed, duration, time_step
  [run]         products, output_dir

Validation failures name the offending key path, e.g. "[grid.fd] n".
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

import numpy as np

from .geometry import DelayRange, Scenario, build_local_scenario, xi_sr
from .surfaces import GridSpec

__all__ = ["Snapshot", "OracleConfig", "RunConfig", "load_config", "PRODUCTS"]

PRODUCTS = (
    "joint_pdf",
    "rho",
    "varrho",
    "r",
    "marginals",
    "moments",
    "limits",
    "coherence",
    "oracle",
    "conjecture_check",
    "dc_family",
)

_GRID_NAMES = ("xi", "fd", "dt", "dftilde")


class ConfigError(ValueError):
    """Malformed or physically inconsistent configuration."""


@dataclass(frozen=True)
class Snapshot:
    t: float
    tx_pos: np.ndarray
    tx_vel: np.ndarray
    rx_pos: np.ndarray
    rx_vel: np.ndarray


@dataclass(frozen=True)
class OracleConfig:
    samples: int
    scatterers: int
    seed: int
    duration: float
    time_step: float


@dataclass(frozen=True)
class RunConfig:
    f_c: float
    c: float
    plane_normal: np.ndarray
    plane_offset: float
    snapshots: tuple[Snapshot, ...]
    delay: DelayRange
    grids: dict[str, GridSpec]
    oracle: OracleConfig
    products: tuple[str, ...]
    output_dir: str

    def scenario(self, index: int = 0) -> Scenario:
        snap = self.snapshots[index]
        return build_local_scenario(
            snap.tx_pos,
            snap.rx_pos,
            snap.tx_vel,
            snap.rx_vel,
            (self.plane_normal, self.plane_offset),
            self.f_c,
            c=self.c,
        )


def _need(cp: configparser.ConfigParser, section: str, key: str) -> str:
    if not cp.has_section(section):
        raise ConfigError(f"missing section: [{section}]")
    if not cp.has_option(section, key):
        raise ConfigError(f"missing key: [{section}] {key}")
    return cp.get(section, key)


def _number(cp, section, key) -> float:
    raw = _need(cp, section, key)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc


def _integer(cp, section, key) -> int:
    val = _number(cp, section, key)
    if val != int(val):
        raise ConfigError(f"[{section}] {key}: expected an integer, got {val!r}")
    return int(val)


def _vector(cp, section, key) -> np.ndarray:
    raw = _need(cp, section, key)
    parts = raw.replace(",", " ").split()
    if len(parts) != 3:
        raise ConfigError(f"[{section}] {key}: expected three components")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not numeric: {raw!r}") from exc


def _positive(value: float, path: str) -> float:
    if not value > 0.0:
        raise ConfigError(f"{path}: must be positive, got {value!r}")
    return value


def load_config(path: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file: {path}")

    f_c = _positive(_number(cp, "world", "f_c"), "[world] f_c")
    c = (
        _positive(_number(cp, "world", "c"), "[world] c")
        if cp.has_option("world", "c")
        else 299792458.0
    )
    normal = _vector(cp, "world", "plane_normal")
    if not np.linalg.norm(normal) > 0.0:
        raise ConfigError("[world] plane_normal: must be a nonzero vector")
    offset = _number(cp, "world", "plane_offset")

    snap_sections = sorted(
        (s for s in cp.sections() if s.startswith("snapshot.")),
        key=lambda s: int(s.split(".", 1)[1]),
    )
    if not snap_sections:
        raise ConfigError("missing section: [snapshot.0]")
    snapshots = []
    for sec in snap_sections:
        t = _number(cp, sec, "t")
        tx_pos = _vector(cp, sec, "tx_pos")
        rx_pos = _vector(cp, sec, "rx_pos")
        tx_vel = _vector(cp, sec, "tx_vel")
        rx_vel = _vector(cp, sec, "rx_vel")
        for label, vel in (("tx_vel", tx_vel), ("rx_vel", rx_vel)):
            if np.linalg.norm(vel) >= c:
                raise ConfigError(f"[{sec}] {label}: speed must stay below c")
        if np.allclose(tx_pos, rx_pos):
            raise ConfigError(f"[{sec}] rx_pos: terminals must be distinct")
        snapshots.append(
            Snapshot(t=t, tx_pos=tx_pos, tx_vel=tx_vel, rx_pos=rx_pos, rx_vel=rx_vel)
        )
    times = [s.t for s in snapshots]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("[snapshot.*] t: snapshot times must increase")

    xi_min = _number(cp, "delay", "xi_min")
    xi_max = _number(cp, "delay", "xi_max")
    if xi_min <= 1.0:
        raise ConfigError(f"[delay] xi_min: must exceed 1, got {xi_min!r}")
    if xi_max <= xi_min:
        raise ConfigError("[delay] xi_max: must exceed xi_min")
    delay = DelayRange(xi_min, xi_max)

    grids: dict[str, GridSpec] = {}
    for name in _GRID_NAMES:
        sec = f"grid.{name}"
        lo = _number(cp, sec, "min")
        hi = _number(cp, sec, "max")
        n = _integer(cp, sec, "n")
        if n < 2:
            raise ConfigError(f"[{sec}] n: need at least 2 points, got {n}")
        if hi <= lo:
            raise ConfigError(f"[{sec}] max: must exceed min")
        grids[name] = GridSpec(name, lo, hi, n)
    if grids["dt"].min != 0.0:
        raise ConfigError("[grid.dt] min: time-lag grid must start at 0")
    if grids["dftilde"].min != 0.0:
        raise ConfigError("[grid.dftilde] min: frequency-lag grid must start at 0")

    oracle = OracleConfig(
        samples=_integer(cp, "oracle", "samples"),
        scatterers=_integer(cp, "oracle", "scatterers"),
        seed=_integer(cp, "oracle", "seed"),
        duration=_positive(_number(cp, "oracle", "duration"), "[oracle] duration"),
        time_step=_positive(
            _number(cp, "oracle", "time_step"), "[oracle] time_step"
        ),
    )
    _positive(float(oracle.samples), "[oracle] samples")
    _positive(float(oracle.scatterers), "[oracle] scatterers")

    prod_raw = _need(cp, "run", "products").replace(",", " ").split()
    if not prod_raw:
        raise ConfigError("[run] products: empty product list")
    for p in prod_raw:
        if p not in PRODUCTS:
            raise ConfigError(
                f"[run] products: unknown product {p!r}; choose from {', '.join(PRODUCTS)}"
            )
    if "dc_family" in prod_raw and len(snapshots) < 2:
        raise ConfigError("[run] products: dc_family needs at least two snapshots")
    output_dir = (
        cp.get("run", "output_dir") if cp.has_option("run", "output_dir") else "out"
    )

    cfg = RunConfig(
        f_c=f_c,
        c=c,
        plane_normal=normal,
        plane_offset=offset,
        snapshots=tuple(snapshots),
        delay=delay,
        grids=grids,
        oracle=oracle,
        products=tuple(prod_raw),
        output_dir=output_dir,
    )

    sc = cfg.scenario(0)
    bound = xi_sr(sc.plane)
    if xi_min <= bound:
        raise ConfigError(
            f"[delay] xi_min: must exceed the shortest scattered delay xi_sr = "
            f"{bound:.6g}, got {xi_min!r}"
        )
    if abs(grids["xi"].min - xi_min) > 1e-12 or abs(grids["xi"].max - xi_max) > 1e-12:
        raise ConfigError("[grid.xi] min: xi grid must span the delay range exactly")
    return cfg
