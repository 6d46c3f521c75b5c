"""Run orchestration: time loop, sampling of diagnostics and snapshots."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FrontTrack, analytic_energy, energy_rate, track_fronts
from .grid import Grid, State
from .io import (
    FORMAT_ALIASES, SUFFIX, export_snapshot, read_manifest, write_manifest, write_series, write_snapshot_index,
)
from .lumped import integrate_lumped
from .params import ConfigError, Parameters, RunConfig, SchemeConfig, apply_overrides
from .scenarios import Scenario, build_scenario, initial_state
from .solver import Stepper, cfl_dt

log = logging.getLogger(__name__)

DEFAULT_CONFIG_SCENARIO = "caseA-6"  # initial condition for config files without a scenario key


@dataclass
class RunResult:
    params: Parameters
    run: RunConfig
    grid: Grid
    dt: float
    steps: int
    initial: State
    final: State
    frames: list[State] = field(default_factory=list)  # snapshots at output cadence
    sample_t: np.ndarray = field(default_factory=lambda: np.empty(0))
    energy: np.ndarray = field(default_factory=lambda: np.empty(0))
    track: FrontTrack | None = None
    probes: dict = field(default_factory=dict)  # probe -> array of (t, T, Y)
    T_peak: np.ndarray | None = None  # per-cell maximum temperature over samples
    scenario: str | None = None
    error: str | None = None
    sample_dt: float = math.nan
    scheme: SchemeConfig | None = None


def _sample_times(t_final: float, every: float) -> np.ndarray:
    n = int(math.floor(t_final / every + 1e-9))
    times = list(np.arange(1, n + 1) * every)
    if not times or times[-1] < t_final - 1e-9:
        times.append(t_final)
    return np.asarray(times)


def simulate(params: Parameters, run: RunConfig, state: State | None = None, *, grid: Grid | None = None,
             ic: Scenario | None = None, sample_dt: float | None = None, threshold: float | None = None,
             probes=(), check_bounds: bool = True, progress: bool = False,
             scheme: SchemeConfig | None = None, on_frame=None) -> RunResult:
    """Integrate from ``state`` to ``run.t_final``.

    Diagnostics (energy rate, fronts, probes, peak temperature) are sampled
    every ``sample_dt`` seconds; full snapshots every ``run.output_dt``.
    The time step is the CFL step shrunk so that sample times fall on step
    boundaries, and stays fixed for the whole run.  ``on_frame(state)`` is
    called for every snapshot as soon as it exists.  A solver failure stops
    the run early; ``result.error`` then describes it and ``result.final`` is
    the last valid state.
    """
    grid = grid or Grid.from_run(run)
    if state is None:
        if ic is None:
            raise ValueError("need an initial state or a scenario")
        state = initial_state(ic, grid)
    scheme = scheme or SchemeConfig.from_run(run)
    if sample_dt is None:
        sample_dt = 5.0 if grid.ndim == 1 else min(run.output_dt, 10.0)
    # samples must also land on every snapshot time
    sample_dt = run.output_dt / math.ceil(run.output_dt / sample_dt - 1e-9)
    dt_max = cfl_dt(grid, params, scheme)
    dt = sample_dt / math.ceil(sample_dt / dt_max - 1e-9)
    stepper = Stepper(params, grid, scheme, state, dt=dt, check_bounds=check_bounds)
    threshold = params.T_pc if threshold is None else threshold

    result = RunResult(params, run, grid, dt, 0, stepper.state.copy(), stepper.state.copy(),
                       frames=[stepper.state.copy()], scenario=ic.name if ic else None)
    result.sample_dt = sample_dt
    result.scheme = scheme
    if on_frame:
        on_frame(result.frames[0])
    times = [0.0]
    energy = [energy_rate(state.T, grid, params)]
    T_peak = state.T.copy()
    track = FrontTrack.empty(threshold) if grid.ndim == 1 else None
    if track is not None:
        track.append(0.0, track_fronts(state.T, grid, threshold))
    probe_idx = {tuple(np.atleast_1d(p).tolist()): grid.locate(p) for p in probes}
    probe_data = {p: [(0.0, state.T[i], state.Y[i])] for p, i in probe_idx.items()}

    next_frame = run.output_dt
    if run.t_final > 0:
        for t_sample in _sample_times(run.t_final, sample_dt):
            try:
                s = stepper.advance_to(float(t_sample))
            except (FloatingPointError, RuntimeError) as err:
                result.error = f"{type(err).__name__}: {err}"
                log.error("run stopped at t=%.6g: %s", stepper.state.t, err)
                break
            times.append(s.t)
            energy.append(energy_rate(s.T, grid, params))
            np.maximum(T_peak, s.T, out=T_peak)
            if track is not None:
                track.append(s.t, track_fronts(s.T, grid, threshold))
            for p, i in probe_idx.items():
                probe_data[p].append((s.t, s.T[i], s.Y[i]))
            if s.t >= next_frame - 1e-9 or abs(s.t - run.t_final) < 1e-9:
                result.frames.append(s.copy())
                next_frame += run.output_dt
                if on_frame:
                    on_frame(result.frames[-1])
            if progress:
                log.info("t=%.1f steps=%d", s.t, stepper.steps)

    result.final = stepper.state.copy()
    result.steps = stepper.steps
    result.sample_t = np.asarray(times)
    result.energy = np.asarray(energy)
    result.track = track
    result.probes = {p: np.asarray(v) for p, v in probe_data.items()}
    result.T_peak = T_peak
    return result


def simulate_scenario(name_or_scenario, *, cells=None, params: Parameters | None = None,
                      run: RunConfig | None = None, **kwargs) -> RunResult:
    """Build a named scenario (optionally overriding cells/params/run) and simulate it."""
    sc = build_scenario(name_or_scenario) if isinstance(name_or_scenario, str) else name_or_scenario
    run = run or sc.run
    if cells is not None:
        cells = (int(cells),) * run.ndim if np.ndim(cells) == 0 else tuple(cells)
        run = run.replace(cells=cells)
    params = params or sc.params
    sc = Scenario(sc.name, params, run, sc.ic, sc.ic_args, sc.probes, sc.description)
    kwargs.setdefault("probes", sc.probes)
    return simulate(params, run, ic=sc, **kwargs)


# ---------------------------------------------------------------------------
# runs written to a directory

@dataclass
class RunOutput:
    directory: Path
    manifest: Path
    snapshots: dict  # t -> file
    series: dict  # name -> file
    result: RunResult | None = None
    ok: bool = True
    error: str | None = None


def resolve_run(source, overrides=()) -> tuple[Scenario, dict]:
    """Scenario plus provenance from a scenario name or a config/manifest path."""
    provenance: dict = {}
    path = Path(str(source))
    if path.suffix in (".txt", ".cfg", ".conf", ".ini") or path.exists():
        params, run, provenance = read_manifest(path)
        base = build_scenario(provenance.get("scenario", DEFAULT_CONFIG_SCENARIO))
    else:
        base = build_scenario(str(source))
        params, run = base.params, base.run
    if overrides:
        params, run = apply_overrides(params, run, list(overrides))
    if run.ndim != base.run.ndim:
        raise ConfigError("scenario", f"{base.name} is {base.run.ndim}D but the config is {run.ndim}D")
    scenario = Scenario(base.name, params, run, base.ic, base.ic_args, base.probes, base.description)
    return scenario, provenance


def run_to_directory(source, out_dir, fmt: str = "csv", overrides=(), lumped_dt: float = 0.01) -> RunOutput:
    """Execute a scenario or config and write manifest, snapshots and series to ``out_dir``."""
    scenario, provenance = resolve_run(source, overrides)
    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    if scenario.ic == "lumped":
        return _run_lumped_to_directory(scenario, out, lumped_dt)

    timing = str(provenance.get("ignition_timing", "True")).lower() not in ("false", "0", "no")
    scheme = SchemeConfig.from_run(scenario.run, ignition_timing=timing)
    suffix = SUFFIX[FORMAT_ALIASES.get(fmt, fmt)]
    snapshots = {}

    def save(state):
        name = f"snapshots/snap_{len(snapshots):04d}{suffix}"
        export_snapshot(state, out / name, fmt)
        snapshots[state.t] = out / name

    result = simulate(scenario.params, scenario.run, ic=scenario, probes=scenario.probes, scheme=scheme,
                      on_frame=save)
    if result.error and result.final.t not in snapshots:
        save(result.final)  # last valid state
    write_snapshot_index(out / "snapshots" / "index.csv", snapshots)
    series = {"energy": write_series(out / "energy.csv", {
        "t": result.sample_t, "E": result.energy,
        "E_decay": analytic_energy(result.energy[0], result.sample_t, scenario.params)})}
    if result.track is not None:
        series["fronts"] = write_series(out / "fronts.csv", {
            "t": result.track.t, "x_left": result.track.x_left, "x_right": result.track.x_right})
    if result.probes:
        cols = {"t": next(iter(result.probes.values()))[:, 0]}
        for probe, data in result.probes.items():
            tag = "_".join(_fmt_coord(c) for c in probe)
            cols[f"T@{tag}"] = data[:, 1]
            cols[f"Y@{tag}"] = data[:, 2]
        series["probes"] = write_series(out / "probes.csv", cols)
    manifest = write_manifest(out / "manifest.txt", scenario.params, scenario.run, {
        "scenario": scenario.name, "code_version": __version__, "dt": result.dt,
        "sample_dt": result.sample_dt, "ignition_timing": timing, "steps": result.steps,
        "status": "failed" if result.error else "ok", "t_reached": result.final.t,
    })
    return RunOutput(out, manifest, snapshots, series, result, ok=result.error is None, error=result.error)


def _fmt_coord(c: float) -> str:
    return f"{c:g}"


def _run_lumped_to_directory(scenario: Scenario, out: Path, dt: float) -> RunOutput:
    args = scenario.ic_args
    traj = integrate_lumped((args["T0"], args["Y0"]), scenario.run.t_final, dt, "rk2", scenario.params)
    stride = max(1, int(round(scenario.run.output_dt / dt)))
    keep = slice(None, None, stride)
    t, T, Y = traj.t[keep], traj.T[keep], traj.Y[keep]
    if t[-1] != traj.t[-1]:
        t, T, Y = np.append(t, traj.t[-1]), np.append(T, traj.T[-1]), np.append(Y, traj.Y[-1])
    series = {"trajectory": write_series(out / "trajectory.csv", {"t": t, "T": T, "Y": Y})}
    manifest = write_manifest(out / "manifest.txt", scenario.params, scenario.run, {
        "scenario": scenario.name, "code_version": __version__, "dt": dt, "steps": len(traj.t) - 1,
        "status": "ok", "t_reached": float(traj.t[-1]),
    })
    return RunOutput(out, manifest, {}, series)
