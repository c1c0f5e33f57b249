"""Command line interface.

Subcommands: run, validate, oracle, plot.  Exit codes: 0 on success,
1 on usage or configuration errors, 2 on numerical or runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import io, mc, runner, svgplot, util
from .config import ConfigError, load_config

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uscatter",
        description="Bistatic scattering-plane channel statistics toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="compute the configured products")
    p_run.add_argument("config", help="path to an INI run configuration")
    p_run.add_argument("--output-dir", help="override the configured output dir")

    p_val = sub.add_parser("validate", help="check a configuration and exit")
    p_val.add_argument("config")

    p_orc = sub.add_parser("oracle", help="run only the Monte Carlo comparison")
    p_orc.add_argument("config")
    p_orc.add_argument("--samples", type=int, help="override oracle sample count")
    p_orc.add_argument("--seed", type=int, help="override oracle seed")

    p_plot = sub.add_parser("plot", help="render an exported surface to SVG")
    p_plot.add_argument("input", help="a .json or .csv surface file")
    p_plot.add_argument("-o", "--output", required=True, help="output .svg path")
    p_plot.add_argument("--kind", choices=("heatmap", "line"))
    return parser


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.output_dir:
        cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
    summary = runner.run(cfg)
    for key in sorted(summary):
        if key in ("failures", "products_completed"):
            continue
        print(f"{key} = {summary[key]}")
    print(f"products completed: {', '.join(summary['products_completed']) or 'none'}")
    if summary["failures"]:
        for name, msg in summary["failures"].items():
            print(f"product {name} failed: {msg}", file=sys.stderr)
        return 2
    return 0


def _cmd_validate(args) -> int:
    try:
        load_config(args.config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {args.config}")
    return 0


def _cmd_oracle(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    oc = cfg.oracle
    if args.samples is not None:
        oc = dataclasses.replace(oc, samples=args.samples)
    if args.seed is not None:
        oc = dataclasses.replace(oc, seed=args.seed)
    cfg = dataclasses.replace(cfg, oracle=oc)
    try:
        outdir = util.output_dir_override() or cfg.output_dir
        os.makedirs(outdir, exist_ok=True)
        sc = cfg.scenario(0)
        samp = mc.sample_scatterers(sc, cfg.delay, cfg.oracle.samples, cfg.oracle.seed)
        emp = mc.empirical_surface(samp, cfg.grids["xi"], cfg.grids["fd"])
        io.export_surface(emp, os.path.join(outdir, "empirical.json"))
        from . import density

        ref = density.joint_cell_probabilities(
            sc, cfg.delay, cfg.grids["xi"], cfg.grids["fd"]
        )
        l1 = runner._l1_distance(emp, ref)
        print(f"oracle_l1 = {l1}")
    except Exception as exc:  # noqa: BLE001 - boundary reporting
        print(f"oracle failed: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_plot(args) -> int:
    try:
        surface = io.import_surface(args.input)
        svgplot.emit_plot(surface, args.output, kind=args.kind)
    except (ValueError, OSError) as exc:
        print(f"plot failed: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "oracle": _cmd_oracle,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold those into the
        # configuration-error class
        return 1 if exc.code else 0
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
