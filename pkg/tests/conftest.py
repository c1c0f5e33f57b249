"""Shared fixtures and scenario factories for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from uscatter.geometry import (
    DelayRange,
    PlaneCoeffs,
    Scenario,
    build_local_scenario,
    xi_sr,
)

C_AIR = 3.0e8

# one line per acceptance criterion, filled by tests/test_acceptance.py and
# echoed after the run so the gate status survives output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def aircraft_scenario() -> Scenario:
    """Two aircraft over a flat ground plane, the workhorse scenario.

    TX and RX fly at 580 m parallel to the ground with slightly
    different speeds; carrier 250 MHz, c rounded to 3e8 m/s.
    """
    return build_local_scenario(
        tx_pos=np.array([0.0, 0.0, 580.0]),
        rx_pos=np.array([627.5, 0.0, 580.0]),
        tx_vel=np.array([247.3e3 / 3600.0, 0.0, 0.0]),
        rx_vel=np.array([245.4e3 / 3600.0, 0.0, 0.0]),
        world_plane=(np.array([0.0, 0.0, 1.0]), 0.0),
        f_c=250e6,
        c=C_AIR,
    )


def aircraft_range() -> DelayRange:
    return DelayRange(xi_min=2.11, xi_max=12.24)


def random_general_scenario(seed: int, *, max_speed: float = 90.0) -> Scenario:
    """Random non-complementary scenario expressed in the local frame."""
    rng = np.random.default_rng(seed)
    while True:
        coeffs = rng.normal(size=4)
        coeffs[:3] /= np.linalg.norm(coeffs[:3])
        a, b, cc, d = coeffs
        if np.hypot(a, b) < 0.1:
            continue
        plane = PlaneCoeffs(A=a, B=b, C=cc, D=d)
        if xi_sr(plane) < 3.0:
            break
    v = rng.uniform(-max_speed, max_speed, size=6)
    return Scenario(
        l=float(rng.uniform(50.0, 500.0)),
        plane=plane,
        v_t=tuple(v[:3]),
        v_r=tuple(v[3:]),
        f_c=float(rng.uniform(1e8, 6e9)),
        c=C_AIR,
    )


def random_complementary_scenario(seed: int, *, max_speed: float = 90.0) -> Scenario:
    """Random scenario whose scattering plane contains the foci axis direction."""
    rng = np.random.default_rng(seed)
    d = float(rng.uniform(0.05, 0.9))
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    v = rng.uniform(-max_speed, max_speed, size=6)
    return Scenario(
        l=float(rng.uniform(50.0, 500.0)),
        plane=PlaneCoeffs(A=0.0, B=0.0, C=sign, D=sign * d),
        v_t=tuple(v[:3]),
        v_r=tuple(v[3:]),
        f_c=float(rng.uniform(1e8, 6e9)),
        c=C_AIR,
    )


def rotation_matrix(seed: int) -> np.ndarray:
    """Random proper rotation, for frame invariance checks."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture(scope="session")
def aircraft() -> Scenario:
    return aircraft_scenario()


@pytest.fixture(scope="session")
def aircraft_delay_range() -> DelayRange:
    return aircraft_range()
