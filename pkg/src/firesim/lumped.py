"""Combustion kinetics and the spatially lumped (T, Y) model.

The implicit integrators work elementwise on arrays so the PDE solver can
apply them cell by cell in one call.  Scalars are accepted everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .params import Parameters

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 20

# euler: backward Euler; midpoint: unsplit implicit midpoint; rk2: the PDE
# solver's Strang step (midpoint reaction halves around SSP-RK3 cooling).
INTEGRATORS = ("euler", "midpoint", "rk2")


class NonlinearSolveError(RuntimeError):
    def __init__(self, message: str, residual: float, index=None):
        self.residual = residual
        self.index = index
        super().__init__(f"{message} (residual {residual:.3e}, index {index})")


class LumpedState(NamedTuple):
    T: float
    Y: float


@dataclass
class LumpedTrajectory:
    t: np.ndarray
    T: np.ndarray
    Y: np.ndarray
    integrator: str
    dt: float

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> LumpedState:
        return LumpedState(float(self.T[-1]), float(self.Y[-1]))


def activation(T, params: Parameters):
    """Ignition switch: 1 where T >= T_pc, else 0."""
    s = (np.asarray(T) >= params.T_pc).astype(float)
    return float(s) if np.ndim(T) == 0 else s


def psi(T, params: Parameters):
    """Reaction rate s(T) A exp(-T_ac / T), 1/s."""
    T = np.asarray(T, dtype=float)
    rate = np.where(T >= params.T_pc, params.A * np.exp(-params.T_ac / T), 0.0)
    return float(rate) if rate.ndim == 0 else rate


def lumped_rhs(state, params: Parameters, cooling: bool = True):
    """Time derivatives (dT/dt, dY/dt) of the lumped model.

    With ``cooling=False`` the ambient exchange term is dropped, which is the
    reaction-only operator used inside the split PDE step.
    """
    T, Y = np.asarray(state[0], dtype=float), np.asarray(state[1], dtype=float)
    rate = np.asarray(psi(T, params))
    h = params.h if cooling else 0.0
    dT = (-h * (T - params.T_inf) + rate * params.rho0 * params.H * Y) / (params.rho0 * params.C)
    dY = -rate * Y
    if dT.ndim == 0:
        return float(dT), float(dY)
    return dT, dY


def _stage_residual(XT, XY, T0, Y0, c, params, h):
    rate = np.where(XT >= params.T_pc, params.A * np.exp(-params.T_ac / XT), 0.0)
    fT = (-h * (XT - params.T_inf) + rate * params.rho0 * params.H * XY) / (params.rho0 * params.C)
    fY = -rate * XY
    return XT - T0 - c * fT, XY - Y0 - c * fY, rate


def _solve_stage(T0, Y0, c, params: Parameters, h: float):
    """Damped Newton for X = y0 + c f(X); s(T) taken at the current iterate.

    Returns (XT, XY, converged, residual).
    """
    XT, XY = T0.copy(), Y0.copy()
    rT, rY, rate = _stage_residual(XT, XY, T0, Y0, c, params, h)
    scale = params.T_inf
    norm = np.maximum(np.abs(rT) / scale, np.abs(rY))
    converged = (np.abs(rT) <= NEWTON_TOL) & (np.abs(rY) <= NEWTON_TOL)
    rc = params.rho0 * params.C
    for _ in range(NEWTON_MAX_ITER):
        if converged.all():
            break
        dpsi = rate * params.T_ac / XT**2
        # J = I - c Df
        a = 1.0 - c * (-h + dpsi * params.rho0 * params.H * XY) / rc
        b = -c * rate * params.H / params.C
        d = c * dpsi * XY
        e = 1.0 + c * rate
        det = a * e - b * d
        dT = -(e * rT - b * rY) / det
        dY = -(a * rY - d * rT) / det
        dT[converged] = 0.0
        dY[converged] = 0.0

        lam = np.ones_like(XT)
        newT, newY = XT + dT, XY + dY
        nrT, nrY, nrate = _stage_residual(newT, newY, T0, Y0, c, params, h)
        nnorm = np.maximum(np.abs(nrT) / scale, np.abs(nrY))
        for _ in range(6):
            worse = (nnorm > norm) & ~converged
            if not worse.any():
                break
            lam = np.where(worse, 0.5 * lam, lam)
            newT, newY = XT + lam * dT, XY + lam * dY
            nrT, nrY, nrate = _stage_residual(newT, newY, T0, Y0, c, params, h)
            nnorm = np.maximum(np.abs(nrT) / scale, np.abs(nrY))

        small_step = (np.abs(lam * dT) <= NEWTON_TOL) & (np.abs(lam * dY) <= NEWTON_TOL)
        XT, XY, rT, rY, rate, norm = newT, newY, nrT, nrY, nrate, nnorm
        converged = converged | ((np.abs(rT) <= NEWTON_TOL) & (np.abs(rY) <= NEWTON_TOL)) | (
            small_step & (np.abs(rT) <= 1e-6) & (np.abs(rY) <= 1e-9)
        )
    return XT, XY, converged, np.maximum(np.abs(rT), np.abs(rY))


def _implicit_step(T, Y, dt, params, method, cooling, depth=0):
    T = np.array(T, dtype=float, ndmin=1)
    Y = np.array(Y, dtype=float, ndmin=1)
    dt = np.broadcast_to(np.asarray(dt, dtype=float), T.shape)
    if method == "rk2":
        return _split_step(T, Y, dt, params)
    h = params.h if cooling else 0.0
    c = dt if method == "euler" else 0.5 * dt
    XT, XY, ok, res = _solve_stage(T, Y, c, params, h)
    if method == "euler":
        newT, newY = XT, XY
    else:
        newT, newY = 2.0 * XT - T, 2.0 * XY - Y
    if not ok.all():
        bad = np.flatnonzero(~ok)
        if depth >= MAX_HALVINGS:
            raise NonlinearSolveError("implicit step failed after dt halving", float(res[bad].max()), bad)
        hT, hY = _implicit_step(T[bad], Y[bad], 0.5 * dt[bad], params, method, cooling, depth + 1)
        hT, hY = _implicit_step(hT, hY, 0.5 * dt[bad], params, method, cooling, depth + 1)
        newT[bad], newY[bad] = hT, hY
    return newT, newY


def ssprk3_cooling(T, dt: float, params: Parameters):
    """SSP-RK3 step of dT/dt = -beta (T - T_inf)."""
    beta = params.beta()
    T1 = T - dt * beta * (T - params.T_inf)
    T2 = 0.75 * T + 0.25 * (T1 - dt * beta * (T1 - params.T_inf))
    return T / 3.0 + 2.0 / 3.0 * (T2 - dt * beta * (T2 - params.T_inf))


def _split_step(T, Y, dt, params):
    T, Y = _implicit_step(T, Y, 0.5 * dt, params, "midpoint", False)
    T = ssprk3_cooling(T, dt, params)
    return _implicit_step(T, Y, 0.5 * dt, params, "midpoint", False)


def implicit_step(T, Y, dt, params: Parameters, method: str = "midpoint", cooling: bool = True):
    """One step for arrays of independent (T, Y) pairs; ``dt`` may be per pair.

    ``cooling`` only affects the unsplit methods; the split ``rk2`` step
    always carries the ambient exchange in its SSP-RK3 part.
    """
    if not np.all(np.asarray(dt) > 0):
        raise ValueError("dt must be > 0")
    if method not in INTEGRATORS:
        raise ValueError(f"unknown integrator {method!r}; expected one of {INTEGRATORS}")
    shape = np.shape(T)
    newT, newY = _implicit_step(T, Y, dt, params, method, cooling)
    return newT.reshape(shape), newY.reshape(shape)


def step_implicit_euler(state, dt: float, params: Parameters, cooling: bool = True) -> LumpedState:
    T, Y = implicit_step(state[0], state[1], dt, params, "euler", cooling)
    return LumpedState(float(T), float(Y))


def step_implicit_rk2(state, dt: float, params: Parameters, cooling: bool = True) -> LumpedState:
    """Implicit midpoint rule: X = y + dt/2 f(X), y_new = 2X - y."""
    T, Y = implicit_step(state[0], state[1], dt, params, "midpoint", cooling)
    return LumpedState(float(T), float(Y))


def step_split(state, dt: float, params: Parameters) -> LumpedState:
    """Strang step: midpoint reaction over dt/2, SSP-RK3 cooling over dt, reaction dt/2."""
    T, Y = implicit_step(state[0], state[1], dt, params, "rk2")
    return LumpedState(float(T), float(Y))


def _time_grid(t_final: float, dt: float) -> np.ndarray:
    n = t_final / dt
    steps = int(round(n)) if abs(n - round(n)) < 1e-9 * max(1.0, n) else int(math.ceil(n))
    t = np.arange(steps + 1) * dt
    t[-1] = t_final
    return t


def integrate_lumped(initial, t_final: float, dt: float, integrator: str = "rk2",
                     params: Parameters | None = None) -> LumpedTrajectory:
    if params is None:
        params = Parameters()
    if not t_final > 0 or not dt > 0:
        raise ValueError("t_final and dt must be > 0")
    if integrator not in INTEGRATORS:
        raise ValueError(f"unknown integrator {integrator!r}")
    t = _time_grid(t_final, dt)
    T = np.empty_like(t)
    Y = np.empty_like(t)
    T[0], Y[0] = initial
    cur_T = np.array([T[0]])
    cur_Y = np.array([Y[0]])
    for i in range(1, len(t)):
        cur_T, cur_Y = _implicit_step(cur_T, cur_Y, t[i] - t[i - 1], params, integrator, True)
        T[i], Y[i] = cur_T[0], cur_Y[0]
    return LumpedTrajectory(t, T, Y, integrator, dt)


def reference_solution(initial, params: Parameters | None = None, t_final: float = 150.0):
    """High-accuracy lumped solution as a callable t -> (T, Y).

    The burning phase is integrated with DOP853 up to the ignition-switch
    crossing; below T_pc the solution is the exact exponential cooling law.
    """
    if params is None:
        params = Parameters()
    T0, Y0 = float(initial[0]), float(initial[1])
    beta = params.beta()

    def cooling(t, t_c, T_c, Y_c):
        t = np.asarray(t, dtype=float)
        return params.T_inf + (T_c - params.T_inf) * np.exp(-beta * (t - t_c)), np.full_like(t, Y_c)

    if T0 < params.T_pc:
        return lambda t: cooling(t, 0.0, T0, Y0)

    def rhs(t, y):
        rate = params.A * math.exp(-params.T_ac / y[0])
        return [(-params.h * (y[0] - params.T_inf) + rate * params.rho0 * params.H * y[1]) / (params.rho0 * params.C),
                -rate * y[1]]

    def switch(t, y):
        return y[0] - params.T_pc

    switch.terminal = True
    switch.direction = -1
    sol = solve_ivp(rhs, (0.0, t_final), [T0, Y0], method="DOP853", rtol=1e-13, atol=1e-12,
                    dense_output=True, events=switch)
    if sol.t_events[0].size:
        t_c = float(sol.t_events[0][0])
        T_c, Y_c = params.T_pc, float(sol.y_events[0][0][1])
    else:
        t_c, T_c, Y_c = math.inf, None, None

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        burning = t < t_c
        T = np.empty_like(t)
        Y = np.empty_like(t)
        if burning.any():
            T[burning], Y[burning] = sol.sol(t[burning])
        if (~burning).any():
            T[~burning], Y[~burning] = cooling(t[~burning], t_c, T_c, Y_c)
        return T, Y

    evaluate.switch_time = t_c
    return evaluate


def trajectory_errors(traj: LumpedTrajectory, reference, t_max: float | None = None) -> tuple[float, float]:
    """L-infinity errors in T and Y over the trajectory samples with t <= t_max."""
    mask = np.ones(len(traj.t), dtype=bool) if t_max is None else traj.t <= t_max + 1e-12
    T_ref, Y_ref = reference(traj.t[mask])
    return float(np.max(np.abs(traj.T[mask] - T_ref))), float(np.max(np.abs(traj.Y[mask] - Y_ref)))


# ---------------------------------------------------------------------------
# phase-space analysis

def tipping_line(T, params: Parameters):
    """Biomass level where dT/dt = 0 in the burning region."""
    T = np.asarray(T, dtype=float)
    y = params.h / (params.rho0 * params.H * params.A) * np.exp(params.T_ac / T) * (T - params.T_inf)
    return float(y) if y.ndim == 0 else y


def tipping_sensitivities(T, params: Parameters):
    """Partial derivatives of the tipping line w.r.t. rho0 and T_ac."""
    if np.any(np.asarray(T) <= params.T_inf):
        raise ValueError("sensitivities require T > T_inf")
    y = np.asarray(tipping_line(T, params))
    d_rho0 = -y / params.rho0
    d_tac = y / np.asarray(T, dtype=float)
    if d_rho0.ndim == 0:
        return float(d_rho0), float(d_tac)
    return d_rho0, d_tac


def temperature_bounds(params: Parameters, T0: float | None = None) -> tuple[float, float]:
    """(T_low, T_max) enclosing every lumped trajectory; T_max is inf when h = 0."""
    T_low = params.T_inf if T0 is None else min(T0, params.T_inf)
    if params.h == 0:
        return T_low, math.inf
    return T_low, params.rho0 / params.h * params.A * params.H + params.T_inf


def terminal_biomass_map(T0_range, Y0_range, resolution, params: Parameters | None = None,
                         dt: float = 0.05, integrator: str = "rk2"):
    """Terminal biomass Y* over a grid of initial states.

    ``T0_range``/``Y0_range`` are (lo, hi) pairs or explicit sequences;
    ``resolution`` is an int or (nT, nY).  Returns (T0 values, Y0 values,
    Ystar[nT, nY]).  Each point runs until it settles on the ambient
    stationary line or hits the cap t = 10 rho0 C / h.
    """
    if params is None:
        params = Parameters()
    if params.h <= 0:
        raise ValueError("terminal maps need h > 0 to return to ambient temperature")
    nT, nY = (resolution, resolution) if np.isscalar(resolution) else resolution

    def axis(rng, n):
        rng = np.asarray(rng, dtype=float)
        return np.linspace(rng[0], rng[1], n) if rng.size == 2 else rng

    T0s = axis(T0_range, nT)
    Y0s = axis(Y0_range, nY)
    if T0s.size == 0 or Y0s.size == 0:
        raise ValueError("ranges must be non-empty")
    TT, YY = np.meshgrid(T0s, Y0s, indexing="ij")
    T, Y = TT.ravel().copy(), YY.ravel().copy()
    t_cap = 10.0 * params.rho0 * params.C / params.h
    active = np.ones(T.size, dtype=bool)
    t = 0.0
    while active.any() and t < t_cap:
        step = min(dt, t_cap - t)
        idx = np.flatnonzero(active)
        T[idx], Y[idx] = _implicit_step(T[idx], Y[idx], step, params, integrator, True)
        t += step
        _, dY = lumped_rhs((T[idx], Y[idx]), params)
        settled = (np.abs(T[idx] - params.T_inf) < 0.01) & (np.abs(dY) < 1e-12)
        active[idx[settled]] = False
    return T0s, Y0s, Y.reshape(TT.shape)
