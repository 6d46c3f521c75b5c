"""Diagnostics: energy dissipation, front tracking, wave speeds and phase portraits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, integrate_field
from .params import Parameters


# ---------------------------------------------------------------------------
# energy dissipation

@dataclass
class EnergySeries:
    t: np.ndarray
    numeric: np.ndarray
    analytic: np.ndarray

    def max_relative_deviation(self) -> float:
        return float(np.max(np.abs(self.numeric - self.analytic)) / abs(self.numeric[0]))


def energy_rate(T: np.ndarray, grid: Grid, params: Parameters) -> float:
    """Domain integral of h (T - T_inf), kW."""
    T = np.asarray(T, dtype=float)
    if T.shape == grid.padded_shape:
        T = grid.interior(T)
    return params.h * integrate_field(T - params.T_inf, grid)


def analytic_energy(E0: float, t, params: Parameters):
    """Exponential decay E0 exp(-beta t) of the combustion-free energy rate."""
    out = E0 * np.exp(-params.beta() * np.asarray(t, dtype=float))
    return float(out) if out.ndim == 0 else out


def energy_series(times, temperatures, grid: Grid, params: Parameters) -> EnergySeries:
    """Numeric energy per frame against the decay law started from the discrete E(0)."""
    t = np.asarray(times, dtype=float)
    E = np.array([energy_rate(T, grid, params) for T in temperatures])
    return EnergySeries(t, E, analytic_energy(E[0], t - t[0], params))


# ---------------------------------------------------------------------------
# fronts and wave speed

@dataclass
class FrontTrack:
    t: np.ndarray
    x_left: np.ndarray  # nan where no front exists
    x_right: np.ndarray
    threshold: float

    @classmethod
    def empty(cls, threshold: float) -> FrontTrack:
        return cls(np.empty(0), np.empty(0), np.empty(0), threshold)

    def append(self, t: float, fronts):
        left, right = fronts if fronts is not None else (math.nan, math.nan)
        self.t = np.append(self.t, t)
        self.x_left = np.append(self.x_left, left)
        self.x_right = np.append(self.x_right, right)

    def envelope(self) -> FrontTrack:
        """Outermost positions reached so far (the ignited extent).

        Unlike the instantaneous crossings this never retreats, so a wave
        that dies stays put instead of following the drifting hot region.
        """
        left = np.fmin.accumulate(np.where(np.isnan(self.x_left), np.inf, self.x_left))
        right = np.fmax.accumulate(np.where(np.isnan(self.x_right), -np.inf, self.x_right))
        left[np.isinf(left)] = np.nan
        right[np.isinf(right)] = np.nan
        return FrontTrack(self.t.copy(), left, right, self.threshold)


@dataclass
class WaveSpeedEstimate:
    speed: float  # positive when the front moves away from the domain centre
    window: tuple[float, float]
    r2: float
    direction: str
    samples: int


def track_fronts(T: np.ndarray, grid: Grid, threshold: float):
    """Outermost crossings of ``threshold`` by linear interpolation between cell centres.

    Returns (x_left, x_right) or None if T never reaches the threshold.
    """
    T = np.asarray(T, dtype=float)
    if grid.ndim != 1:
        raise ValueError("front tracking works on 1D states")
    if T.shape == grid.padded_shape:
        T = grid.interior(T)
    hot = np.flatnonzero(T >= threshold)
    if hot.size == 0:
        return None
    x = grid.centers(0)
    i, j = hot[0], hot[-1]
    if i == 0:
        left = x[0]
    else:
        left = x[i - 1] + (threshold - T[i - 1]) / (T[i] - T[i - 1]) * (x[i] - x[i - 1])
    if j == len(T) - 1:
        right = x[-1]
    else:
        right = x[j] + (T[j] - threshold) / (T[j] - T[j + 1]) * (x[j + 1] - x[j])
    return float(left), float(right)


def _line_fit(t, x):
    slope, intercept = np.polyfit(t, x, 1)
    resid = x - (slope * t + intercept)
    ss_tot = float(np.sum((x - x.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), r2


def measure_wave_speed(track: FrontTrack, window, min_samples: int = 10) -> dict[str, WaveSpeedEstimate]:
    """Least-squares front speeds over ``window`` for both directions.

    The left speed is the negated slope of x_left so an outward-moving left
    front has positive speed.
    """
    t0, t1 = window
    sel = (track.t >= t0 - 1e-9) & (track.t <= t1 + 1e-9)
    if sel.sum() < min_samples:
        raise ValueError(f"only {int(sel.sum())} samples in window {window}; need {min_samples}")
    out = {}
    for direction, xs, sign in (("left", track.x_left, -1.0), ("right", track.x_right, 1.0)):
        x = xs[sel]
        if np.any(np.isnan(x)):
            raise ValueError(f"{direction} front absent inside window {window}")
        slope, r2 = _line_fit(track.t[sel], x)
        out[direction] = WaveSpeedEstimate(sign * slope, (t0, t1), r2, direction, int(sel.sum()))
    return out


def front_extinct(track: FrontTrack, direction: str, final_span: float = 200.0, tolerance: float = 1.0) -> bool:
    """True if the front moved less than ``tolerance`` metres over the last ``final_span`` seconds."""
    xs = track.x_left if direction == "left" else track.x_right
    t_end = track.t[-1]
    sel = track.t >= t_end - final_span - 1e-9
    x = xs[sel]
    if np.all(np.isnan(x)):
        return True
    x = x[~np.isnan(x)]
    return bool(abs(x[-1] - x[0]) < tolerance)


# ---------------------------------------------------------------------------
# closed-form speed estimates

def speed_bounds(params: Parameters) -> tuple[float, float]:
    """Lower and upper travelling-wave speed bounds of the cooling-free model, m/s."""
    dT = params.T_ac - params.T_inf
    if dT <= 0:
        raise ValueError("speed bounds need T_ac > T_inf")
    excess = 1.0 - params.C / params.H * dT if params.H > 0 else -math.inf
    if excess < 0:
        raise ValueError("speed bounds need H >= C (T_ac - T_inf)")
    common = params.H / (params.rho0 * params.C) * excess / dT * params.A
    c_star = math.sqrt(params.k) * math.sqrt(common / math.e)
    c_sup = math.sqrt(params.k) * math.sqrt(common * math.exp(-params.T_ac / (params.T_inf + params.H / params.C)))
    return c_star, c_sup


def linearised_speed(Y: float, params: Parameters) -> float | None:
    """Linear spreading speed at ambient temperature with biomass frozen at Y.

    Returns None when the growth rate is negative (no propagation).
    """
    rc = params.rho0 * params.C
    growth = (params.H / params.C * params.A * Y * params.T_ac / params.T_inf**2
              * math.exp(-params.T_ac / params.T_inf) - params.h / rc)
    if growth < 0:
        return None
    return 2.0 * math.sqrt(params.k / rc * growth)


# ---------------------------------------------------------------------------
# phase space

def phase_trajectory(frames, grid: Grid, probe) -> np.ndarray:
    """(T, Y) samples at the cell containing ``probe`` for each frame.

    ``frames`` is an iterable of (T, Y) array pairs or State objects.
    """
    index = grid.locate(probe)
    out = []
    for frame in frames:
        T, Y = (frame.T, frame.Y) if hasattr(frame, "T") else frame
        out.append((float(np.asarray(T)[index]), float(np.asarray(Y)[index])))
    return np.array(out).reshape(-1, 2)
