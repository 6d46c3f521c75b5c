"""firesim command line: run, lumped, analyze, verify, scenario.

Failures exit non-zero and print ``error: <category>: <message>`` on stderr,
with category one of the keys of EXIT_CODES.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import FrontTrack, front_extinct, linearised_speed, measure_wave_speed, speed_bounds
from .io import SNAPSHOT_FORMATS, read_manifest, read_series, write_series
from .lumped import INTEGRATORS, NonlinearSolveError, integrate_lumped
from .params import ConfigError, RunConfig, apply_overrides, default_parameters, dump_config
from .scenarios import build_scenario, scenario_names

EXIT_CODES = {"config-error": 2, "io-error": 3, "solver-error": 4, "verification-failed": 5}


class CommandError(Exception):
    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


def _cmd_run(args) -> int:
    from .runner import run_to_directory

    source = args.config or args.scenario
    if source is None:
        raise ConfigError("scenario", "give a scenario name or --config PATH")
    out = run_to_directory(source, args.out, fmt=args.format, overrides=args.set, lumped_dt=args.dt)
    print(f"wrote {out.directory} ({len(out.snapshots)} snapshots)")
    if not out.ok:
        raise CommandError("solver-error", f"{out.error}; last valid snapshot kept")
    return 0


def _cmd_lumped(args) -> int:
    params, _ = apply_overrides(default_parameters(), RunConfig(), args.set)
    traj = integrate_lumped((args.T0, args.Y0), args.t_final, args.dt, args.integrator, params)
    if args.out:
        write_series(args.out, {"t": traj.t, "T": traj.T, "Y": traj.Y})
    else:
        print("t,T,Y")
        for row in zip(traj.t, traj.T, traj.Y):
            print(",".join(repr(float(v)) for v in row))
    T, Y = traj.final
    print(f"final T={T!r} Y={Y!r}", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    if args.run_dir is None:
        params, _ = apply_overrides(default_parameters(), RunConfig(), args.set)
        return _print_estimates(params, args.Y)
    run_dir = Path(args.run_dir)
    params, run, prov = read_manifest(run_dir / "manifest.txt")
    print(f"run: {prov.get('scenario', '?')}  status={prov.get('status', '?')}  t={prov.get('t_reached', '?')}")
    energy_file = run_dir / "energy.csv"
    if energy_file.exists():
        e = read_series(energy_file)
        dev = np.max(np.abs(e["E"] - e["E_decay"])) / abs(e["E"][0]) if e["E"][0] else float("nan")
        print(f"energy: max relative deviation from E0 exp(-beta t) = {dev:.6g}")
    fronts_file = run_dir / "fronts.csv"
    if fronts_file.exists():
        f = read_series(fronts_file)
        track = FrontTrack(f["t"], f["x_left"], f["x_right"], params.T_pc).envelope()
        window = tuple(args.window) if args.window else (min(200.0, 0.25 * run.t_final), run.t_final)
        try:
            speeds = measure_wave_speed(track, window)
        except ValueError as err:
            print(f"fronts: {err}")
        else:
            for d, est in speeds.items():
                state = "extinct" if front_extinct(track, d) else "moving"
                print(f"front {d:5s}: speed {est.speed:.6g} m/s  R2 {est.r2:.6f}  ({state}, window {window})")
    return _print_estimates(params, args.Y)


def _print_estimates(params, Y: float) -> int:
    try:
        lo, hi = speed_bounds(params.replace(h=0.0))
        print(f"cooling-free speed bounds: c* = {lo:.6g}, c_sup = {hi:.6g} m/s")
    except ValueError as err:
        print(f"speed bounds unavailable: {err}")
    c = linearised_speed(Y, params)
    print(f"linearised speed at Y={Y:g}: " + ("no propagation" if c is None else f"{c:.6g} m/s"))
    return 0


def _cmd_verify(args) -> int:
    from .verify import verify

    report = verify(args.case)
    print(report.to_text())
    if not report.passed:
        raise CommandError("verification-failed", "one or more gating checks failed")
    return 0


def _cmd_scenario(args) -> int:
    if args.action == "list":
        for name in scenario_names():
            print(f"{name:18s} {build_scenario(name).description}")
        return 0
    if not args.name:
        raise ConfigError("scenario", "describe needs a scenario name")
    try:
        sc = build_scenario(args.name)
    except KeyError as err:
        raise ConfigError("scenario", str(err.args[0])) from None
    print(f"# {sc.description}")
    print(f"# initial condition: {sc.ic} {sc.ic_args}")
    sys.stdout.write(dump_config(sc.params, sc.run, {"scenario": sc.name}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firesim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_set(p):
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")

    p = sub.add_parser("run", help="run a scenario or config file into an output directory")
    p.add_argument("scenario", nargs="?", help="scenario name (see 'firesim scenario list')")
    p.add_argument("--config", help="config or manifest file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", default="csv", choices=SNAPSHOT_FORMATS + ("structured-grid-text",))
    p.add_argument("--dt", type=float, default=0.01, help="time step of lumped scenarios")
    add_set(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("lumped", help="integrate the spatially lumped model")
    p.add_argument("--T0", type=float, default=470.0)
    p.add_argument("--Y0", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-final", type=float, default=150.0)
    p.add_argument("--integrator", choices=INTEGRATORS, default="rk2")
    p.add_argument("--out", help="CSV file (default: stdout)")
    add_set(p)
    p.set_defaults(func=_cmd_lumped)

    p = sub.add_parser("analyze", help="speeds and energy of a finished run, or closed-form estimates")
    p.add_argument("run_dir", nargs="?", help="directory written by 'firesim run'")
    p.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"), help="speed fit window, s")
    p.add_argument("--Y", type=float, default=1.0, help="biomass for the linearised speed")
    add_set(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("verify", help="solver verification report")
    p.add_argument("case", nargs="?", default="all", choices=("lumped", "advdiff", "gridspeed", "all"))
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("scenario", help="list or describe named scenarios")
    p.add_argument("action", choices=("list", "describe"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=_cmd_scenario)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CommandError as err:
        category, message = err.category, str(err)
    except ConfigError as err:
        category, message = "config-error", str(err)
    except KeyError as err:
        category, message = "config-error", str(err.args[0]) if err.args else "unknown key"
    except (OSError, UnicodeDecodeError) as err:
        category, message = "io-error", str(err)
    except (NonlinearSolveError, FloatingPointError) as err:
        category, message = "solver-error", str(err)
    except ValueError as err:
        category, message = "config-error", str(err)
    print(f"error: {category}: {message}", file=sys.stderr)
    return EXIT_CODES[category]


if __name__ == "__main__":
    sys.exit(main())
