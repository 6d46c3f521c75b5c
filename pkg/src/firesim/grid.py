"""Cell-centred structured grids, ghost layers and the (T, Y) field state."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import BOUNDARY_CONDITIONS, RunConfig


@dataclass(frozen=True)
class Grid:
    """Uniform 1D/2D mesh.  Arrays are indexed ``[ix]`` or ``[ix, iy]``."""

    extents: tuple[tuple[float, float], ...]
    cells: tuple[int, ...]
    bc: str = "transmissive"
    ghost: int = 4

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple((float(a), float(b)) for a, b in self.extents))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        if len(self.extents) != len(self.cells) or self.ndim not in (1, 2):
            raise ValueError("extents and cells must describe a 1D or 2D grid")
        if any(n < 1 for n in self.cells) or any(hi <= lo for lo, hi in self.extents):
            raise ValueError("cell counts must be positive and extents increasing")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.ghost < 1:
            raise ValueError("ghost width must be >= 1")
        if self.ghost > min(self.cells) and self.bc == "periodic":
            raise ValueError("periodic ghost layers wider than the grid")

    @classmethod
    def from_run(cls, run: RunConfig) -> Grid:
        return cls(run.domain, run.cells, run.bc, ghost_width(run.weno_order))

    @property
    def ndim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def padded_shape(self) -> tuple[int, ...]:
        return tuple(n + 2 * self.ghost for n in self.cells)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.extents, self.cells))

    @property
    def dx(self) -> float:
        return self.spacing[0]

    @property
    def dy(self) -> float:
        return self.spacing[1]

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def centers(self, axis: int = 0) -> np.ndarray:
        lo, _ = self.extents[axis]
        return lo + (np.arange(self.cells[axis]) + 0.5) * self.spacing[axis]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*(self.centers(a) for a in range(self.ndim)), indexing="ij")

    def interior(self, padded: np.ndarray) -> np.ndarray:
        g = self.ghost
        return padded[(slice(g, -g),) * self.ndim]

    def pad(self, values: np.ndarray) -> np.ndarray:
        """Copy interior values into a new ghost-padded array with ghosts filled."""
        out = np.empty(self.padded_shape)
        self.interior(out)[...] = values
        return fill_ghosts(out, self)

    def locate(self, point) -> tuple[int, ...]:
        """Index of the cell containing ``point``; raises if outside the domain."""
        point = np.atleast_1d(point)
        if point.size != self.ndim:
            raise ValueError(f"probe needs {self.ndim} coordinates")
        idx = []
        for axis, p in enumerate(point):
            lo, hi = self.extents[axis]
            if not lo <= p <= hi:
                raise ValueError(f"probe {tuple(point)} outside domain")
            idx.append(min(int((p - lo) / self.spacing[axis]), self.cells[axis] - 1))
        return tuple(idx)


def ghost_width(weno_order: int) -> int:
    return max(1, (weno_order + 1) // 2)


def fill_ghosts(field: np.ndarray, grid: Grid) -> np.ndarray:
    """Populate ghost layers in place (periodic wrap or zero-gradient copy)."""
    g = grid.ghost
    for axis in range(grid.ndim):
        a = np.moveaxis(field, axis, 0)
        n = grid.cells[axis]
        if grid.bc == "periodic":
            a[:g] = a[n : n + g]
            a[n + g :] = a[g : 2 * g]
        else:
            a[:g] = a[g : g + 1]
            a[n + g :] = a[n + g - 1 : n + g]
    return field


def integrate_field(values: np.ndarray, grid: Grid) -> float:
    """Midpoint-rule integral over interior cells; ghost layers are skipped."""
    values = np.asarray(values, dtype=float)
    if values.shape == grid.padded_shape:
        values = grid.interior(values)
    elif values.shape != grid.shape:
        raise ValueError(f"field shape {values.shape} does not match grid {grid.shape}")
    return float(values.sum() * grid.cell_volume)


@dataclass
class State:
    """Temperature and biomass on a grid (interior cells only) at time ``t``."""

    T: np.ndarray
    Y: np.ndarray
    t: float = 0.0
    grid: Grid | None = field(default=None, repr=False)

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if self.T.shape != self.Y.shape:
            raise ValueError("T and Y must share the grid shape")
        if self.grid is not None and self.T.shape != self.grid.shape:
            raise ValueError("fields do not match the grid")
        if self.t < 0:
            raise ValueError("t must be >= 0")

    def copy(self) -> State:
        return State(self.T.copy(), self.Y.copy(), self.t, self.grid)

    def check(self, atol: float = 1e-12):
        """Raise if the field invariants (T > 0, Y in [0, 1]) are broken."""
        if not np.all(np.isfinite(self.T)) or np.any(self.T <= 0):
            raise FloatingPointError(f"non-physical temperature at t={self.t}")
        if np.any(self.Y < -atol) or np.any(self.Y > 1 + atol):
            raise FloatingPointError(f"biomass left [0, 1] at t={self.t}")
