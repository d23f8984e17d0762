"""``fbgcavity`` command line: modes, rates, decay, singlemode, figure."""

from __future__ import annotations

import argparse
import sys

from . import config as config_mod
from . import figures, runs
from .config import ConfigError
from .decay_engine import DecayError
from .emission_rates import RateConvergenceError
from .fiber_modes import ModeSolverError
from .output import render
from .quadrature import QuadratureError
from .radiation_modes import NormalizationError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_INTEGRATOR = 0, 2, 3, 4

SOLVER_ERRORS = (ModeSolverError, RateConvergenceError, QuadratureError, NormalizationError)


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="flat key = value configuration file")
    parser.add_argument("--out", default=d, help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=d)
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        default=d, help="override a configuration key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbgcavity",
        description="Spontaneous emission of an atom near a nanofiber inside a "
                    "fiber-Bragg-grating cavity.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", parents=[common], help="HE11 mode summary and radial profile")
    p.add_argument("--profile", type=int, metavar="N", help="radial profile sample count")
    p.add_argument("--rmax", type=float, metavar="NM", help="profile outer radius (nm)")

    p = sub.add_parser("rates", parents=[common], help="cavity-modified rates, optionally swept")
    p.add_argument("--sweep", choices=("a", "r", "z", "R2"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int)

    sub.add_parser("decay", parents=[common], help="integrate the delay equation")
    sub.add_parser("singlemode", parents=[common], help="single-mode cavity parameters")

    p = sub.add_parser("figure", parents=[common], help="regenerate data for one figure")
    p.add_argument("id", help="figure id: " + ", ".join(figures.FIGURES))
    return parser


def _overrides(args) -> list[str]:
    sets = list(args.set or [])
    extra = {"format": "output.format", "out": "output.path", "profile": "modes.profile_points",
             "rmax": "modes.profile_rmax_nm", "sweep": "sweep.param", "start": "sweep.start",
             "stop": "sweep.stop", "points": "sweep.points"}
    for attr, key in extra.items():
        value = getattr(args, attr, None)
        if value is not None:
            sets.append(f"{key}={value}")
    return sets


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_mod.load(args.config, _overrides(args))
        if args.command == "modes":
            table = runs.modes_table(cfg)
        elif args.command == "rates":
            table = runs.rates_table(cfg)
        elif args.command == "decay":
            table = runs.decay_table(cfg)
        elif args.command == "singlemode":
            table = runs.singlemode_table(cfg)
        else:
            table = figures.figure_table(args.id, cfg)
    except figures.UnknownFigureError as exc:
        print(f"error: unknown figure id {exc.args[0]!r}; known: "
              + ", ".join(figures.FIGURES), file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecayError as exc:
        print(f"integrator error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = render(table, cfg.output.format, cfg.output.precision)
    if cfg.output.path:
        with open(cfg.output.path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
