"""WENO-JS reconstruction of interface values from cell averages.

Orders 3, 5, 7 use r = (order + 1) / 2 candidate stencils of r cells each;
order 1 is donor-cell (the upwind cell average).  All coefficients are
derived once from exact polynomial cell averages on a unit grid, so every
order shares the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

DEFAULT_EPSILON = 1e-6


def _cell_average_matrix(offsets, degree):
    """Row m: averages of x^l over the unit cell centred at offsets[m]."""
    offsets = np.asarray(offsets, dtype=float)
    powers = np.arange(degree + 1)
    return ((offsets[:, None] + 0.5) ** (powers + 1) - (offsets[:, None] - 0.5) ** (powers + 1)) / (powers + 1)


def _interface_weights(offsets, point=0.5):
    """Linear weights mapping cell averages at ``offsets`` to p(point)."""
    deg = len(offsets) - 1
    M = _cell_average_matrix(offsets, deg)
    e = point ** np.arange(deg + 1)
    return np.linalg.solve(M.T, e)


def _smoothness_form(offsets):
    """Matrix Q with beta = u^T Q u = sum_l int_{-1/2}^{1/2} (d^l p / dx^l)^2 dx."""
    r = len(offsets)
    Minv = np.linalg.inv(_cell_average_matrix(offsets, r - 1))
    Q = np.zeros((r, r))
    for l in range(1, r):
        # p^(l)(x) = sum_j a_j j!/(j-l)! x^(j-l); D maps a -> coefficients of p^(l)
        D = np.zeros((r - l, r))
        for j in range(l, r):
            D[j - l, j] = factorial(j) / factorial(j - l)
        G = np.zeros((r - l, r - l))
        for i in range(r - l):
            for j in range(r - l):
                antideriv = P.polyint([0] * (i + j) + [1])
                G[i, j] = P.polyval(0.5, antideriv) - P.polyval(-0.5, antideriv)
        Q += D.T @ G @ D
    return Minv.T @ Q @ Minv


@dataclass(frozen=True)
class WenoCoefficients:
    order: int
    r: int
    # candidate k uses cells i - k + j, j = 0..r-1 (k = 0 is the right-most stencil)
    stencil_weights: np.ndarray  # (r, r)
    linear_weights: np.ndarray  # (r,)
    smoothness: np.ndarray  # (r, r, r): one quadratic form per candidate
    smoothness_factors: tuple  # per candidate: (eigenvalues, eigenvectors) of the form


@lru_cache(maxsize=None)
def weno_coefficients(order: int) -> WenoCoefficients:
    if order not in (1, 3, 5, 7):
        raise ValueError(f"unsupported WENO order {order}")
    r = (order + 1) // 2
    cand = np.array([_interface_weights([-k + j for j in range(r)]) for k in range(r)])
    full = _interface_weights(list(range(-r + 1, r)))
    # sum_k d_k * (candidate k embedded in the full stencil) = full-stencil weights
    E = np.zeros((2 * r - 1, r))
    for k in range(r):
        E[r - 1 - k : 2 * r - 1 - k, k] = cand[k]
    d, *_ = np.linalg.lstsq(E, full, rcond=None)
    forms = np.array([_smoothness_form([-k + j for j in range(r)]) for k in range(r)])
    factors = []
    for Q in forms:
        lam, vec = np.linalg.eigh(Q)
        keep = lam > 1e-12 * max(1.0, lam.max())
        factors.append((lam[keep], vec[:, keep]))
    return WenoCoefficients(order, r, cand, d, forms, tuple(factors))


def _weno_combine(cells, coeffs: WenoCoefficients, epsilon: float):
    """Nonlinear combination.  ``cells[m]`` holds data at offset m - (r - 1)."""
    r = coeffs.r
    if r == 1:
        return cells[0]
    scale = np.abs(cells[0])
    for c in cells[1:]:
        scale = np.maximum(scale, np.abs(c))
    # smoothness measured on data scaled by the stencil maximum
    eps = epsilon * scale * scale + 1e-300
    alphas = []
    values = []
    for k in range(r):
        stencil = [cells[r - 1 - k + j] for j in range(r)]
        q = coeffs.stencil_weights[k]
        value = q[0] * stencil[0]
        for j in range(1, r):
            value = value + q[j] * stencil[j]
        lam, vec = coeffs.smoothness_factors[k]
        beta = 0.0
        for m in range(len(lam)):
            w = vec[0, m] * stencil[0]
            for j in range(1, r):
                w = w + vec[j, m] * stencil[j]
            beta = beta + lam[m] * w * w
        alphas.append(coeffs.linear_weights[k] / (eps + beta) ** 2)
        values.append(value)
    total = alphas[0]
    for a in alphas[1:]:
        total = total + a
    out = alphas[0] * values[0]
    for a, v in zip(alphas[1:], values[1:]):
        out = out + a * v
    return out / total


def weno_reconstruct(stencil, order: int, side: str = "right", epsilon: float = DEFAULT_EPSILON) -> float:
    """Interface value of the centre cell of ``stencil`` (length ``order``).

    ``side='right'`` gives the value at the cell's right face reconstructed
    from the left (upwind for positive velocity); ``side='left'`` is the
    mirror image, the left face seen from the right.
    """
    stencil = np.asarray(stencil, dtype=float)
    if stencil.shape != (order,):
        raise ValueError(f"order-{order} reconstruction needs {order} cells, got {stencil.shape}")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if side == "left":
        stencil = stencil[::-1]
    coeffs = weno_coefficients(order)
    return float(_weno_combine(list(stencil), coeffs, epsilon))


def interface_values(padded: np.ndarray, axis: int, ghost: int, order: int, upwind_from_left: bool,
                     epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Upwind-biased values at the n + 1 faces along ``axis`` of a ghost-padded array.

    Face m (m = 0..n) sits between interior cells m - 1 and m.
    """
    coeffs = weno_coefficients(order)
    r = coeffs.r
    if ghost < r:
        raise ValueError(f"order {order} needs at least {r} ghost cells")
    u = np.moveaxis(padded, axis, 0)
    n = u.shape[0] - 2 * ghost
    if upwind_from_left:
        centre = ghost - 1  # padded index of cell i = -1 (left of face 0)
        cells = [u[centre + s : centre + s + n + 1] for s in range(-(r - 1), r)]
    else:
        centre = ghost  # cell i + 1, mirrored stencil
        cells = [u[centre - s : centre - s + n + 1] for s in range(-(r - 1), r)]
    faces = _weno_combine(cells, coeffs, epsilon)
    return np.moveaxis(faces, 0, axis)
