"""Shared helpers for the test suite (independent brute-force oracles)."""
import numpy as np


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def dense_tridiag(dl, d, du) -> np.ndarray:
    return np.diag(np.asarray(d, dtype=complex)) \
        + np.diag(np.asarray(du, dtype=complex), 1) \
        + np.diag(np.asarray(dl, dtype=complex), -1)


def indicator_measures(p, lam, delta, m, window, points=10 ** 6):
    """Midpoint-grid indicator measures of the thickened set and its
    delta-neighborhood (run-length dilation); test-side oracle only."""
    lo, hi = window
    cell = (hi - lo) / points
    ys = lo + (np.arange(points) + 0.5) * cell
    inside = np.abs(p.deriv(ys, 0) - lam) < delta ** m
    measure_e = float(np.count_nonzero(inside)) * cell
    radius = int(round(delta / cell))
    step = np.diff(inside.astype(np.int8))
    starts = (np.flatnonzero(step == 1) + 1).tolist()
    ends = (np.flatnonzero(step == -1) + 1).tolist()
    if inside[0]:
        starts.insert(0, 0)
    if inside[-1]:
        ends.append(points)
    dilated = np.zeros(points, dtype=bool)
    for s, e in zip(starts, ends):
        dilated[max(0, s - radius):min(points, e + radius)] = True
    measure_n = float(np.count_nonzero(dilated)) * cell
    return measure_e, measure_n
