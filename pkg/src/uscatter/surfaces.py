"""Uniform grid axes and immutable complex-valued surfaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Scenario

__all__ = ["GridSpec", "ComplexSurface", "surface_meta"]


@dataclass(frozen=True)
class GridSpec:
    """Uniformly spaced axis with n points on [min, max]."""

    name: str
    min: float
    max: float
    n: int

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("axis name must be nonempty")
        if not (self.max > self.min):
            raise ValueError(f"axis {self.name}: require max > min")
        if self.n < 2:
            raise ValueError(f"axis {self.name}: require n >= 2")

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n)

    def cell_widths(self) -> np.ndarray:
        """Node-centered cell widths; identical to trapezoid weights."""
        w = np.full(self.n, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def cell_edges(self) -> np.ndarray:
        """Edges of the node-centered cells (n + 1 values)."""
        pts = self.points()
        inner = 0.5 * (pts[:-1] + pts[1:])
        return np.concatenate([[pts[0]], inner, [pts[-1]]])

    def index_of(self, value: float, tol: float = 1e-9) -> int:
        """Index of the node equal to value within tol of one step."""
        idx = int(round((value - self.min) / self.step))
        if idx < 0 or idx >= self.n or abs(self.points()[idx] - value) > tol * max(
            abs(self.step), 1.0
        ):
            raise ValueError(f"axis {self.name}: {value} is not a grid node")
        return idx


@dataclass(frozen=True)
class ComplexSurface:
    """Complex values over one or two uniform axes (immutable once built)."""

    axes: tuple[GridSpec, ...]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        if len(axes) not in (1, 2):
            raise ValueError("a surface has one or two axes")
        vals = np.asarray(self.values, dtype=complex)
        expected = tuple(ax.n for ax in axes)
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != grid shape {expected}")
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("NaN or Inf in surface values")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def axis(self, i: int) -> GridSpec:
        return self.axes[i]

    def real(self) -> np.ndarray:
        return self.values.real

    def row_at(self, value: float) -> np.ndarray:
        """Values along axis 1 at the axis-0 node equal to value."""
        return self.values[self.axes[0].index_of(value)]

    def col_at(self, value: float) -> np.ndarray:
        """Values along axis 0 at the axis-1 node equal to value."""
        return self.values[:, self.axes[1].index_of(value)]


def surface_meta(sc: Scenario, function: str, **extra) -> dict:
    meta = {"scenario": sc.content_hash(), "function": function}
    meta.update(extra)
    return meta
