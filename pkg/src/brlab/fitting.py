"""Small shared numerics: geometric grids and log-log slope fits."""

from __future__ import annotations

import numpy as np

__all__ = ["geometric_grid", "loglog_slope", "log2_slope"]


def geometric_grid(lo: float, hi: float, per_octave: int) -> np.ndarray:
    """Geometric grid from lo to hi with `per_octave` points per factor of 2.

    Endpoints are included; spacing is exactly 2**(1/per_octave).
    """
    if not (lo > 0 and hi > lo):
        raise ValueError("need 0 < lo < hi")
    n_steps = int(np.ceil(per_octave * np.log2(hi / lo)))
    k = np.arange(n_steps + 1)
    grid = lo * 2.0 ** (k / per_octave)
    grid[-1] = min(grid[-1], hi)
    return grid


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x); ignores nonpositive y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = (x > 0) & (y > 0)
    if mask.sum() < 2:
        raise ValueError("need at least two positive samples for a slope fit")
    lx, ly = np.log(x[mask]), np.log(y[mask])
    return float(np.polyfit(lx, ly, 1)[0])


def log2_slope(k, y) -> float:
    """Least-squares slope of log2(y) against the integer scale index k."""
    k = np.asarray(k, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("log2 slope fit needs positive values")
    return float(np.polyfit(k, np.log2(y), 1)[0])
