"""Minimal deterministic SVG rendering for exported surfaces.

Two kinds: a magnitude heatmap for 2-D surfaces and a line plot of the
real part for 1-D surfaces.  No third-party plotting stack; the output
is plain SVG text so files are identical across reruns.
"""

from __future__ import annotations

import math

import numpy as np

from .surfaces import ComplexSurface

__all__ = ["emit_plot"]

_W = 720
_H = 540
_MARGIN = 60

# five-stop blue-to-yellow ramp, linearly interpolated
_STOPS = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(_STOPS) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(_STOPS) - 1)
    frac = pos - lo
    rgb = (1.0 - frac) * _STOPS[lo] + frac * _STOPS[hi]
    return f"#{int(rgb[0]):02x}{int(rgb[1]):02x}{int(rgb[2]):02x}"


def _downsample(vals: np.ndarray, limit: int = 160) -> np.ndarray:
    s0 = max(1, int(math.ceil(vals.shape[0] / limit)))
    s1 = max(1, int(math.ceil(vals.shape[1] / limit)))
    return vals[::s0, ::s1]


def _heatmap(surface: ComplexSurface) -> str:
    mag = _downsample(np.abs(surface.values))
    lo = float(mag.min())
    hi = float(mag.max())
    if hi - lo <= 1e-300 * max(abs(hi), 1.0):
        raise ValueError("constant surface: nothing to render as a heatmap")
    norm = (mag - lo) / (hi - lo)
    n0, n1 = norm.shape
    cw = (_W - 2 * _MARGIN) / n1
    ch = (_H - 2 * _MARGIN) / n0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    for i in range(n0):
        y = _MARGIN + (n0 - 1 - i) * ch
        for j in range(n1):
            x = _MARGIN + j * cw
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw + 0.5:.2f}" '
                f'height="{ch + 0.5:.2f}" fill="{_color(norm[i, j])}"/>'
            )
    parts.append(_frame_and_labels(surface))
    parts.append("</svg>")
    return "\n".join(parts)


def _frame_and_labels(surface: ComplexSurface) -> str:
    ax = surface.axes
    x0, x1 = _MARGIN, _W - _MARGIN
    y0, y1 = _MARGIN, _H - _MARGIN
    parts = [
        f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" '
        'fill="none" stroke="black"/>'
    ]
    if surface.ndim == 2:
        xlab, ylab = ax[1].name, ax[0].name
        xmin, xmax = ax[1].min, ax[1].max
        ymin, ymax = ax[0].min, ax[0].max
    else:
        xlab, ylab = ax[0].name, "value"
        xmin, xmax = ax[0].min, ax[0].max
        ymin = ymax = None
    parts.append(
        f'<text x="{(x0 + x1) / 2}" y="{_H - 18}" text-anchor="middle" '
        f'font-size="14">{xlab}</text>'
    )
    parts.append(
        f'<text x="18" y="{(y0 + y1) / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2})">{ylab}</text>'
    )
    parts.append(
        f'<text x="{x0}" y="{_H - 38}" text-anchor="middle" font-size="12">'
        f"{xmin:.6g}</text>"
    )
    parts.append(
        f'<text x="{x1}" y="{_H - 38}" text-anchor="middle" font-size="12">'
        f"{xmax:.6g}</text>"
    )
    if ymin is not None:
        parts.append(
            f'<text x="{x0 - 6}" y="{y1}" text-anchor="end" font-size="12">'
            f"{ymin:.6g}</text>"
        )
        parts.append(
            f'<text x="{x0 - 6}" y="{y0 + 10}" text-anchor="end" font-size="12">'
            f"{ymax:.6g}</text>"
        )
    return "\n".join(parts)


def _line(surface: ComplexSurface) -> str:
    x = surface.axes[0].points()
    y = surface.values.real
    lo = float(y.min())
    hi = float(y.max())
    if hi - lo <= 1e-300 * max(abs(hi), 1.0):
        raise ValueError("constant surface: nothing to scale on the value axis")
    sx = (x - x[0]) / (x[-1] - x[0]) * (_W - 2 * _MARGIN) + _MARGIN
    sy = _H - _MARGIN - (y - lo) / (hi - lo) * (_H - 2 * _MARGIN)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<polyline points="{pts}" fill="none" stroke="#2166ac" stroke-width="1.5"/>',
        _frame_and_labels(surface),
        f'<text x="{_MARGIN - 6}" y="{_H - _MARGIN}" text-anchor="end" '
        f'font-size="12">{lo:.6g}</text>',
        f'<text x="{_MARGIN - 6}" y="{_MARGIN + 10}" text-anchor="end" '
        f'font-size="12">{hi:.6g}</text>',
        "</svg>",
    ]
    return "\n".join(parts)


def emit_plot(surface: ComplexSurface, path: str, kind: str | None = None) -> None:
    """Render a surface to an SVG file.

    kind is "heatmap" or "line"; by default 2-D surfaces render as
    magnitude heatmaps and 1-D surfaces as real-part line plots.
    Constant surfaces are rejected rather than silently autoscaled.
    """
    if kind is None:
        kind = "heatmap" if surface.ndim == 2 else "line"
    if kind == "heatmap":
        if surface.ndim != 2:
            raise ValueError("heatmap needs a 2-D surface")
        text = _heatmap(surface)
    elif kind == "line":
        if surface.ndim != 1:
            raise ValueError("line plot needs a 1-D surface")
        text = _line(surface)
    else:
        raise ValueError(f"unknown plot kind: {kind!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")
