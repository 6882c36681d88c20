"""Deterministic bracketing minimizers used by the nested optimizations.

Everything here minimizes.  Callers maximize by negating their objective.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = 1.0 - INV_PHI

# values closer than this are treated as equal when picking among grid points
TIE_TOL = 1e-12


def golden_steps(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))


def golden_section_batch(
    f: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Golden-section minimization of many independent 1-D problems at once.

    ``f`` maps an array of abscissae (same shape as ``a``) to objective values.
    Each problem is searched on its own bracket ``[a, b]``; iteration stops
    once the widest bracket has shrunk below ``tol``.

    Returns:
        ``(x, fx, nevals)``: the best point evaluated per problem, its value,
        and the number of calls made to ``f``.
    """
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    h = hi - lo
    c = lo + INV_PHI2 * h
    d = lo + INV_PHI * h
    fc = f(c)
    fd = f(d)
    nevals = 2
    for _ in range(golden_steps(float(np.max(h, initial=0.0)), tol)):
        left = fc < fd
        # keep [lo, d] where f(c) < f(d), otherwise [c, hi]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        h = hi - lo
        new_c = np.where(left, lo + INV_PHI2 * h, d)
        new_d = np.where(left, c, lo + INV_PHI * h)
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        nevals += 1
        fc_next = np.where(left, fp, fd)
        fd_next = np.where(left, fc, fp)
        c, d, fc, fd = new_c, new_d, fc_next, fd_next
    x = np.where(fc <= fd, c, d)
    fx = np.minimum(fc, fd)
    return x, fx, nevals


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10):
    """Scalar golden-section minimization on ``[a, b]``; returns ``(x, fx, nevals)``."""
    x, fx, n = golden_section_batch(
        lambda xs: np.array([f(float(xs[0]))]), np.array([a]), np.array([b]), tol
    )
    return float(x[0]), float(fx[0]), n


def pick_grid_min(values: np.ndarray, prefer: str = "low", tie_tol: float = TIE_TOL) -> int:
    """Index of the smallest value; near-ties go to the lowest (or highest) index."""
    values = np.asarray(values, dtype=float)
    near = np.flatnonzero(values <= values.min() + tie_tol)
    return int(near[0] if prefer == "low" else near[-1])


def grid_then_golden(
    f_vec: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n_grid: int,
    tol: float,
    prefer: str = "low",
    periodic: bool = False,
    candidates: int = 3,
) -> tuple[float, float, int]:
    """Minimize a 1-D function: uniform grid on ``[lo, hi]``, then golden refinement.

    The best few grid local minima are each refined over the two grid cells
    around them.  A refined point replaces its grid point only if it is better
    by more than the tie tolerance, and among the refined candidates near-ties
    go to the smallest (``prefer="low"``) or largest abscissa.  With
    ``periodic`` the function is taken to have period ``hi - lo``: the grid
    excludes ``hi`` and brackets wrap around.
    """
    if periodic:
        grid = lo + (hi - lo) * np.arange(n_grid) / n_grid
    else:
        grid = np.linspace(lo, hi, n_grid)
    vals = f_vec(grid)
    nevals = n_grid
    step = grid[1] - grid[0] if n_grid > 1 else hi - lo
    if periodic:
        left, right = np.roll(vals, 1), np.roll(vals, -1)
    else:
        left = np.concatenate([[np.inf], vals[:-1]])
        right = np.concatenate([vals[1:], [np.inf]])
    minima = np.flatnonzero((vals <= left) & (vals <= right))
    if len(minima) == 0:
        minima = np.array([pick_grid_min(vals, prefer)])
    minima = minima[np.argsort(vals[minima], kind="stable")[:candidates]]
    a = grid[minima] - step
    b = grid[minima] + step
    if not periodic:
        a = np.maximum(a, lo)
        b = np.minimum(b, hi)
    x, fx, n = golden_section_batch(f_vec, a, b, tol)
    nevals += n * len(minima)
    if periodic:
        x = lo + np.mod(x - lo, hi - lo)
    use = fx < vals[minima] - TIE_TOL
    xs = np.where(use, x, grid[minima])
    fs = np.where(use, fx, vals[minima])
    order = np.argsort(xs, kind="stable")
    k = order[pick_grid_min(fs[order], prefer)]
    return float(xs[k]), float(fs[k]), nevals


def grid_size_for(width: float, tol: float, default: int) -> int:
    """Number of grid points: ``default`` unless ``tol`` is coarser than its spacing."""
    if tol <= width / (default - 1):
        return default
    return max(2, int(math.ceil(width / tol)) + 1)
