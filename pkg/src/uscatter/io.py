"""Deterministic surface export and import (CSV and JSON).

Floats are written with 17 significant digits so files round-trip
exactly and reruns are byte-identical.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .surfaces import ComplexSurface, GridSpec

__all__ = ["export_surface", "import_surface", "write_json", "read_json"]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _jdump(obj, parts: list) -> None:
    """Minimal JSON writer with fixed float formatting and sorted keys."""
    if isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _jdump(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _jdump(item, parts)
        parts.append("]")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_fmt(obj))
    elif obj is None:
        parts.append("null")
    else:
        parts.append(json.dumps(str(obj)))


def dumps(obj) -> str:
    parts: list = []
    _jdump(obj, parts)
    return "".join(parts)


def write_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _surface_doc(surface: ComplexSurface) -> dict:
    return {
        "axes": [
            {"name": g.name, "min": g.min, "max": g.max, "n": g.n}
            for g in surface.axes
        ],
        "values_re": surface.values.real,
        "values_im": surface.values.imag,
        "meta": dict(surface.meta),
    }


def export_surface(surface: ComplexSurface, path: str) -> None:
    """Write a surface to path; the extension picks the format.

    JSON documents carry axes, values_re, values_im, and meta.  CSV files
    carry meta as leading '#' comment lines followed by one row per grid
    node in row-major order.
    """
    ext = os.path.splitext(path)[1].lower()
    if ext == ".json":
        write_json(_surface_doc(surface), path)
        return
    if ext != ".csv":
        raise ValueError(f"unsupported export format: {ext!r} (use .csv or .json)")
    lines = []
    for key in sorted(surface.meta):
        lines.append(f"# {key}={surface.meta[key]}")
    for g in surface.axes:
        lines.append(f"# axis {g.name} min={_fmt(g.min)} max={_fmt(g.max)} n={g.n}")
    if surface.ndim == 2:
        a0 = surface.axes[0].points()
        a1 = surface.axes[1].points()
        lines.append("axis1,axis2,re,im")
        vals = surface.values
        for i in range(len(a0)):
            x = _fmt(a0[i])
            for j in range(len(a1)):
                v = vals[i, j]
                lines.append(f"{x},{_fmt(a1[j])},{_fmt(v.real)},{_fmt(v.imag)}")
    else:
        a0 = surface.axes[0].points()
        lines.append("axis1,re,im")
        for i, v in enumerate(surface.values):
            lines.append(f"{_fmt(a0[i])},{_fmt(v.real)},{_fmt(v.imag)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _parse_meta_line(line: str, meta: dict, axes: list) -> None:
    body = line[1:].strip()
    if body.startswith("axis "):
        fields = body.split()
        name = fields[1]
        kv = dict(f.split("=", 1) for f in fields[2:])
        axes.append(GridSpec(name, float(kv["min"]), float(kv["max"]), int(kv["n"])))
    elif "=" in body:
        key, val = body.split("=", 1)
        meta[key.strip()] = val.strip()


def import_surface(path: str) -> ComplexSurface:
    """Read a surface previously written by export_surface."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".json":
        doc = read_json(path)
        axes = tuple(
            GridSpec(a["name"], float(a["min"]), float(a["max"]), int(a["n"]))
            for a in doc["axes"]
        )
        vals = np.asarray(doc["values_re"], dtype=float) + 1j * np.asarray(
            doc["values_im"], dtype=float
        )
        return ComplexSurface(axes, vals, dict(doc.get("meta", {})))
    if ext != ".csv":
        raise ValueError(f"unsupported import format: {ext!r} (use .csv or .json)")
    meta: dict = {}
    axes: list = []
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                _parse_meta_line(line, meta, axes)
            elif line[0].isalpha():
                continue  # column header
            else:
                rows.append([float(f) for f in line.split(",")])
    if not axes:
        raise ValueError(f"no axis metadata in {path}")
    data = np.asarray(rows)
    if len(axes) == 2:
        shape = (axes[0].n, axes[1].n)
        vals = (data[:, 2] + 1j * data[:, 3]).reshape(shape)
    else:
        vals = data[:, 1] + 1j * data[:, 2]
    return ComplexSurface(tuple(axes), vals, meta)
