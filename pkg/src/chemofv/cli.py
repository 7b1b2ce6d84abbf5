"""Command-line interface.

Verbs:
  run <preset|config>   integrate one configuration and write outputs
  sweep <preset>        expand a preset's sweep axis and run every member
  steady [key=val ...]  print/write the analytic stationary profile
  compare <A> <B>       error report between two runs (or one run and
                        'analytic')
  presets               list the bundled presets

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 I/O error.  The default output directory is $CHEMOFV_OUT or ./chemofv_out.
"""

import argparse
import math
import os
import sys

import numpy as np

from .config import ConfigError, apply_overrides, parse_config
from .driver import run
from .model import PhysicalParams
from .output import (OutputError, compare_fields, compare_to_profile,
                     read_final_snapshot, read_summary, write_outputs)
from .presets import PRESETS, get_preset, sweep_configs
from .steady import (NoBumpSolutionError, UnsupportedExponentError,
                     centered_bump, lateral_bump)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_CONFIG_ERRORS = (ConfigError, NoBumpSolutionError, UnsupportedExponentError,
                  ValueError)


def default_out_dir():
    return os.environ.get("CHEMOFV_OUT", os.path.join(os.curdir, "chemofv_out"))


class _Parser(argparse.ArgumentParser):
    """Usage errors surface as ConfigError so they map to exit code 1."""

    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(
        prog="chemofv",
        description="1D finite-volume solver for pressure-driven cell "
                    "migration with chemotaxis (density, momentum, "
                    "chemoattractant).")
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="integrate one configuration")
    run_p.add_argument("target", nargs="?",
                       help="preset name or path to a config file")
    run_p.add_argument("--config", help="path to a config file")
    run_p.add_argument("--preset", help="preset name")
    _common_flags(run_p)

    sweep_p = sub.add_parser("sweep", help="run every member of a preset sweep")
    sweep_p.add_argument("preset", help="preset name")
    _common_flags(sweep_p)

    steady_p = sub.add_parser("steady",
                              help="evaluate the analytic stationary profile")
    steady_p.add_argument("assignments", nargs="*", metavar="key=value",
                          help="model parameters (epsilon, gamma, alpha, chi, "
                               "D, a, b, L) and mass")
    steady_p.add_argument("--kind", choices=("lateral", "centered"),
                          default="lateral")
    steady_p.add_argument("--samples", type=int, default=11,
                          help="number of sample points (default 11)")
    steady_p.add_argument("--out", help="write the sampled profile as CSV here")
    steady_p.add_argument("--quiet", action="store_true")

    cmp_p = sub.add_parser("compare", help="error report between two runs")
    cmp_p.add_argument("a", help="run directory / snapshots CSV / 'analytic'")
    cmp_p.add_argument("b", help="run directory / snapshots CSV / 'analytic'")
    cmp_p.add_argument("--quiet", action="store_true")

    sub.add_parser("presets", help="list bundled presets")
    return parser


def _common_flags(p):
    p.add_argument("--out", help="output directory (default $CHEMOFV_OUT "
                                 "or ./chemofv_out)")
    p.add_argument("--override", action="append", default=[],
                   metavar="key=value", help="config override (repeatable)")
    p.add_argument("--quiet", action="store_true")


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OutputError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config(text)


def _resolve_run_target(args):
    """Returns (base_name, RunConfig) for the run verb."""
    picked = [x for x in (args.config, args.preset, args.target) if x]
    if not picked:
        raise ConfigError("run: give a preset name or a config file "
                          "(positional, --preset, or --config)")
    if args.config:
        return os.path.splitext(os.path.basename(args.config))[0], \
            _load_config_file(args.config)
    if args.preset:
        return args.preset, get_preset(args.preset).base
    target = args.target
    if os.path.exists(target):
        return os.path.splitext(os.path.basename(target))[0], \
            _load_config_file(target)
    return target, get_preset(target).base


def _report_run(label, result, paths, quiet):
    if quiet:
        return
    d = result.diagnostics
    res_q = d.res_q[-1] if len(d) else math.nan
    print(f"{label}: stop={result.stop_reason} t={result.final_time:.6g} "
          f"steps={result.n_steps} mass={result.final.mass():.9g} "
          f"bumps={result.diagnostics.bumps[-1] if len(d) else 'n/a'} "
          f"res_q={res_q:.3e} wall={result.wall_time:.2f}s")
    if result.failure_detail:
        print(f"{label}: failure detail: {result.failure_detail}")
    print(f"{label}: wrote {paths['snapshots']}, {paths['diagnostics']}, "
          f"{paths['summary']}")


def cmd_run(args):
    base_name, config = _resolve_run_target(args)
    if args.override:
        config = apply_overrides(config, args.override)
    out_dir = args.out or default_out_dir()
    result = run(config)
    paths = write_outputs(result, out_dir, base_name, quiet=args.quiet)
    _report_run(base_name, result, paths, args.quiet)
    return EXIT_NUMERICAL if result.failed else EXIT_OK


def cmd_sweep(args):
    preset = get_preset(args.preset)
    out_dir = args.out or default_out_dir()
    status = EXIT_OK
    for label, config in sweep_configs(preset):
        if args.override:
            config = apply_overrides(config, args.override)
        result = run(config)
        paths = write_outputs(result, out_dir, label, quiet=args.quiet)
        _report_run(label, result, paths, args.quiet)
        if result.failed:
            status = EXIT_NUMERICAL
    return status


def cmd_steady(args):
    values = {}
    mass = None
    fields = {f: float for f in
              ("epsilon", "gamma", "alpha", "chi", "D", "a", "b", "L")}
    for item in args.assignments:
        if "=" not in item:
            raise ConfigError(f"steady: expected key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        if key == "mass":
            mass = float(value)
        elif key in fields:
            values[key] = float(value)
        else:
            raise ConfigError(f"steady: unknown parameter {key!r} (known: "
                              f"mass, {', '.join(fields)})")
    if mass is None:
        raise ConfigError("steady: a total mass is required (mass=<value>)")
    params = PhysicalParams(**values)
    builder = lateral_bump if args.kind == "lateral" else centered_bump
    profile = builder(params, mass)

    if args.samples < 2:
        raise ConfigError("steady: --samples must be at least 2")
    xs = np.linspace(0.0, params.L, args.samples)
    rho = profile.rho(xs)
    phi = profile.phi(xs)
    if not args.quiet:
        print(f"kind={profile.kind} tau={profile.tau:.12g} "
              f"xbar={profile.xbar:.12g} ybar={profile.ybar:.12g} "
              f"K={profile.K:.12g} mass={profile.rho_integral(0, params.L):.12g}")
        print("x,rho,phi")
        for i in range(args.samples):
            print(f"{xs[i]:.12g},{rho[i]:.12g},{phi[i]:.12g}")
    if args.out:
        path = os.path.join(args.out, f"steady_{profile.kind}.csv")
        try:
            os.makedirs(args.out, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("x,rho,phi\n")
                for i in range(args.samples):
                    fh.write(f"{xs[i]:.17g},{rho[i]:.17g},{phi[i]:.17g}\n")
        except OSError as exc:
            raise OutputError(f"cannot write {path!r}: {exc}") from exc
        if not args.quiet:
            print(f"wrote {path}")
    return EXIT_OK


def _locate_snapshots(target):
    """Accept a run directory or a direct *_snapshots.csv path."""
    if os.path.isdir(target):
        hits = sorted(f for f in os.listdir(target)
                      if f.endswith("_snapshots.csv"))
        if not hits:
            raise ConfigError(f"no *_snapshots.csv found in {target!r}")
        if len(hits) > 1:
            raise ConfigError(
                f"{target!r} holds several runs ({', '.join(hits)}); "
                f"point at one snapshots CSV directly")
        return os.path.join(target, hits[0])
    return target


def _analytic_profile_for(snapshot_path, field):
    """Build the analytic reference matching a stored run's summary."""
    summary_path = snapshot_path.replace("_snapshots.csv", "_summary.json")
    if not os.path.exists(summary_path):
        raise ConfigError(
            f"cannot build the analytic reference: {summary_path!r} is missing")
    summary = read_summary(summary_path)
    config = parse_config(summary["config"])
    builder = centered_bump if config.init == "centered_bump" else lateral_bump
    return builder(config.params, field.mass())


def cmd_compare(args):
    if args.a == "analytic" and args.b == "analytic":
        raise ConfigError("compare: at most one side can be 'analytic'")
    if args.a == "analytic":
        # normalize: the analytic side is always B
        args.a, args.b = args.b, args.a
    path_a = _locate_snapshots(args.a)
    _, field_a = read_final_snapshot(path_a)
    label_a = os.path.basename(path_a).replace("_snapshots.csv", "")
    if args.b == "analytic":
        profile = _analytic_profile_for(path_a, field_a)
        report = compare_to_profile(field_a, profile, label_a=label_a)
    else:
        path_b = _locate_snapshots(args.b)
        _, field_b = read_final_snapshot(path_b)
        label_b = os.path.basename(path_b).replace("_snapshots.csv", "")
        report = compare_fields(field_a, field_b, label_a=label_a,
                                label_b=label_b)
    if not args.quiet:
        print(report.as_text())
    return EXIT_OK


def cmd_presets(args):
    for name in sorted(PRESETS):
        p = PRESETS[name]
        if p.sweep_key:
            values = ",".join(str(v) for v in p.sweep_values)
            axis = f"sweep {p.sweep_key} = {values}"
        else:
            axis = "single run"
        print(f"{name}: {axis}")
        print(f"  {p.description}")
        if p.expected:
            print(f"  expected: {p.expected}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "steady": cmd_steady,
                "compare": cmd_compare, "presets": cmd_presets}
    try:
        args = parser.parse_args(argv)
        return handlers[args.verb](args)
    except OutputError as exc:
        print(f"chemofv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _CONFIG_ERRORS as exc:
        print(f"chemofv: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
