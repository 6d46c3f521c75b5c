"""Finite-volume transport, split reaction substeps and the Strang stepper."""

from __future__ import annotations

import numpy as np

from .grid import Grid, State
from .lumped import NonlinearSolveError, implicit_step, temperature_bounds
from .params import Parameters, SchemeConfig
from .weno import interface_values

BOUNDS_SLACK = 0.05  # K, allowed excursion outside the invariant temperature interval


def cfl_dt(grid: Grid, params: Parameters, scheme: SchemeConfig) -> float:
    """Explicit time step from advection, diffusion and ambient-exchange limits.

    dt = cfl * min(dx / max|v|, dx^2 / (2 d alpha), 1 / beta); terms whose
    coefficient vanishes are skipped.
    """
    dx = min(grid.spacing)
    limits = []
    vmax = max(abs(c) for c in params.v)
    if vmax > 0:
        limits.append(dx / vmax)
    alpha = params.alpha()
    if alpha > 0:
        limits.append(dx * dx / (2 * grid.ndim * alpha))
    beta = params.beta()
    if beta > 0:
        limits.append(1.0 / beta)
    if not limits:
        raise ValueError("no advection, diffusion or exchange term bounds the time step")
    return scheme.cfl * min(limits)


def _velocity(params: Parameters, grid: Grid) -> tuple[float, ...]:
    v = tuple(params.v) + (0.0,) * (grid.ndim - len(params.v))
    return v[: grid.ndim]


def advective_update(T_padded: np.ndarray, v, grid: Grid, order: int, epsilon: float = 1e-6) -> np.ndarray:
    """Finite-volume divergence of the flux v T, i.e. the discrete v . grad T."""
    v = tuple(np.atleast_1d(v)) + (0.0,) * grid.ndim
    out = np.zeros(grid.shape)
    for axis in range(grid.ndim):
        va = float(v[axis])
        if va == 0.0:
            continue
        faces = interface_values(T_padded, axis, grid.ghost, order, upwind_from_left=va > 0, epsilon=epsilon)
        faces = _interior_cross(faces, axis, grid)
        lo = [slice(None)] * grid.ndim
        hi = [slice(None)] * grid.ndim
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        out += va / grid.spacing[axis] * (faces[tuple(hi)] - faces[tuple(lo)])
    return out


def _interior_cross(arr: np.ndarray, axis: int, grid: Grid) -> np.ndarray:
    """Drop ghost layers on every axis except ``axis``."""
    g = grid.ghost
    index = [slice(g, -g)] * grid.ndim
    index[axis] = slice(None)
    return arr[tuple(index)]


def diffusive_update(T_padded: np.ndarray, grid: Grid, params: Parameters) -> np.ndarray:
    """alpha times the second-order central Laplacian on interior cells."""
    alpha = params.alpha()
    out = np.zeros(grid.shape)
    if alpha == 0.0:
        return out
    g = grid.ghost
    centre = grid.interior(T_padded)
    for axis in range(grid.ndim):
        minus = [slice(g, -g)] * grid.ndim
        plus = [slice(g, -g)] * grid.ndim
        n = grid.cells[axis]
        minus[axis] = slice(g - 1, g - 1 + n)
        plus[axis] = slice(g + 1, g + 1 + n)
        out += (T_padded[tuple(plus)] - 2.0 * centre + T_padded[tuple(minus)]) / grid.spacing[axis] ** 2
    return alpha * out


def transport_rhs(T: np.ndarray, grid: Grid, params: Parameters, scheme: SchemeConfig) -> np.ndarray:
    """dT/dt from advection, diffusion and ambient exchange for interior values ``T``."""
    padded = grid.pad(T)
    rhs = diffusive_update(padded, grid, params)
    v = _velocity(params, grid)
    if any(v):
        rhs -= advective_update(padded, v, grid, scheme.weno_order, scheme.weno_epsilon)
    beta = params.beta()
    if beta:
        rhs -= beta * (T - params.T_inf)
    return rhs


def transport_step_ssprk3(state: State, dt: float, params: Parameters, scheme: SchemeConfig,
                          grid: Grid | None = None) -> State:
    """Three-stage SSP-RK3 update of T; Y has no transport and is copied."""
    grid = grid or state.grid
    T = state.T
    T1 = T + dt * transport_rhs(T, grid, params, scheme)
    T2 = 0.75 * T + 0.25 * (T1 + dt * transport_rhs(T1, grid, params, scheme))
    T3 = T / 3.0 + 2.0 / 3.0 * (T2 + dt * transport_rhs(T2, grid, params, scheme))
    return State(T3, state.Y.copy(), state.t + dt, grid)


def reaction_substep(state: State, dt, params: Parameters) -> State:
    """Combustion over ``dt`` cell by cell with the implicit midpoint rule.

    ``dt`` is a scalar or an array of per-cell durations (zero entries are
    skipped).  Ambient exchange is not part of this operator.  Cells below
    T_pc have zero reaction rate and are left untouched.
    """
    T = state.T.copy()
    Y = state.Y.copy()
    dt = np.broadcast_to(np.asarray(dt, dtype=float), T.shape)
    hot = np.flatnonzero(((T >= params.T_pc) & (Y > 0) & (dt > 0)).ravel())
    if hot.size and params.A > 0:
        Tf, Yf = T.reshape(-1), Y.reshape(-1)
        try:
            Tf[hot], Yf[hot] = implicit_step(Tf[hot], Yf[hot], dt.reshape(-1)[hot], params, "midpoint",
                                             cooling=False)
        except NonlinearSolveError as err:
            cells = hot[np.atleast_1d(err.index)]
            raise NonlinearSolveError("reaction substep failed", err.residual,
                                      [np.unravel_index(c, T.shape) for c in cells]) from err
    return State(T, Y, state.t, state.grid)


def ignition_durations(T_before: np.ndarray, T_after: np.ndarray, dt: float, params: Parameters) -> np.ndarray:
    """Closing reaction time per cell for a Strang step.

    Cells already burning get dt/2.  A cell that crosses T_pc during the
    transport stage, at the linearly interpolated fraction theta of the
    step, gets (1 - theta) dt: the time it actually spent above ignition.
    Without this the ignition instant snaps to step boundaries and front
    speeds lock onto dx / (m dt) plateaus.
    """
    out = np.full(T_after.shape, 0.5 * dt)
    crossed = (T_before < params.T_pc) & (T_after >= params.T_pc)
    if crossed.any():
        theta = (params.T_pc - T_before[crossed]) / (T_after[crossed] - T_before[crossed])
        out[crossed] = (1.0 - theta) * dt
    return out


def strang_step(state: State, dt: float, params: Parameters, scheme: SchemeConfig,
                grid: Grid | None = None) -> State:
    grid = grid or state.grid
    half = reaction_substep(state, 0.5 * dt, params)
    moved = transport_step_ssprk3(half, dt, params, scheme, grid)
    closing = ignition_durations(half.T, moved.T, dt, params) if scheme.ignition_timing else 0.5 * dt
    return reaction_substep(moved, closing, params)


class Stepper:
    """Advances a State with a fixed time step chosen once at construction."""

    def __init__(self, params: Parameters, grid: Grid, scheme: SchemeConfig, state: State,
                 dt: float | None = None, check_bounds: bool = True):
        self.params = params
        self.grid = grid
        self.scheme = scheme
        self.state = State(state.T, state.Y, state.t, grid)
        self.dt = cfl_dt(grid, params, scheme) if dt is None else dt
        self.steps = 0
        self.check_bounds = check_bounds
        T_low, T_max = temperature_bounds(params, float(self.state.T.min()))
        self.bounds = (T_low, max(T_max, float(self.state.T.max())))

    def step(self, dt: float | None = None) -> State:
        """One Strang step; on failure ``self.state`` keeps the last valid state."""
        dt = self.dt if dt is None else dt
        new = strang_step(self.state, dt, self.params, self.scheme, self.grid)
        if self.check_bounds:
            self._check(new, self.state.Y)
        self.state = new
        self.steps += 1
        return new

    def _check(self, s: State, prev_Y):
        s.check()
        lo, hi = self.bounds
        # WENO reconstructions of steep profiles can undershoot by a few mK
        tol = BOUNDS_SLACK
        if s.T.min() < lo - tol or s.T.max() > hi + tol:
            raise FloatingPointError(
                f"temperature left [{lo}, {hi}] at t={s.t}: range [{s.T.min()}, {s.T.max()}]")
        if np.any(s.Y > prev_Y):
            raise FloatingPointError(f"biomass increased at t={s.t}")

    def advance_to(self, t_target: float) -> State:
        """Take fixed steps up to ``t_target``; the last one is shortened to land on it."""
        while self.state.t < t_target - 1e-9 * max(1.0, t_target):
            remaining = t_target - self.state.t
            if remaining < self.dt * (1 + 1e-9):
                self.step(remaining)
                self.state.t = t_target
            else:
                self.step()
        return self.state
