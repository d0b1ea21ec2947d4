"""Level-set geometry of a shear profile.

Everything here reduces to 1D interval arithmetic on the monotone pieces of
v: roots of v = lambda, the thickened level set {|v - lambda| < delta^m},
its delta-neighborhood, their Lebesgue measures, and the clipped
signed-distance cutoff built on top of them.  Measures are computed
piecewise-analytically (bracketed root finding on each monotone piece), so
they are exact up to root tolerance; grid counting is used only as a test
oracle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateProfileError, InvalidParamsError, OutOfDomainError
from .profiles import ShearProfile

ROOT_XTOL = 1e-13
MERGE_TOL = 1e-12


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class MonotonePiece:
    lo: float
    hi: float
    direction: Direction


@dataclass(frozen=True)
class MeasureResult:
    measure: float
    intervals: tuple[tuple[float, float], ...]
    truncation_saturated: bool


@dataclass(frozen=True)
class LevelSetReport:
    """One (lambda, delta) row of a measure sweep."""

    lam: float
    delta: float
    m: int
    roots: tuple[float, ...]
    card: int
    measure_E: float
    measure_Ecal: float
    ratio: float
    saturated: bool


@dataclass(frozen=True)
class MeasureSweep:
    rows: tuple[LevelSetReport, ...]
    sup_ratio: float


def _window_tuple(window) -> tuple[float, float]:
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise InvalidParamsError(f"window must satisfy lo < hi, got ({lo}, {hi})")
    return lo, hi


def find_monotone_pieces(p: ShearProfile, window, tol: float = 1e-12,
                         samples: int = 2048) -> list[MonotonePiece]:
    """Split the window at the sign changes of v'.

    Breakpoints are bracketed on a uniform sample of v' and polished by
    bracketed root finding to ``tol``.  Raises if v' vanishes identically on
    two consecutive sample cells (flat segment, no monotone split exists).
    """
    lo, hi = _window_tuple(window)
    if lo < p.domain.a or hi > p.domain.b:
        raise OutOfDomainError("window extends outside the profile domain")
    xs = np.linspace(lo, hi, samples)
    d1 = p.deriv(xs, 1)
    zero = d1 == 0.0
    if np.any(zero[:-1] & zero[1:]):
        raise DegenerateProfileError(f"v' of {p.name} vanishes on a whole subinterval")
    signs = np.sign(d1)
    dv = lambda y: float(p.deriv(np.asarray(y, dtype=float), 1))
    breakpoints = []
    for i in range(samples - 1):
        si, sj = signs[i], signs[i + 1]
        if si == 0.0 and lo < xs[i] < hi:
            # sample landed exactly on a critical point; a breakpoint only
            # if the sign actually flips across it
            before = signs[i - 1] if i > 0 else 0.0
            if before != 0.0 and sj != 0.0 and before != sj:
                breakpoints.append(float(xs[i]))
        elif si * sj < 0:
            breakpoints.append(float(brentq(dv, xs[i], xs[i + 1],
                                            xtol=max(tol, 4e-16 * max(1.0, abs(hi - lo))))))
    edges = [lo] + sorted(breakpoints) + [hi]
    pieces = []
    scale = max(1.0, abs(hi - lo))
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= MERGE_TOL * scale:
            continue
        va, vb = float(p.deriv(np.asarray(a), 0)), float(p.deriv(np.asarray(b), 0))
        pieces.append(MonotonePiece(a, b, Direction.UP if vb > va else Direction.DOWN))
    if not pieces:
        raise DegenerateProfileError("window collapsed to zero usable length")
    return pieces


def _root_on_piece(p: ShearProfile, piece: MonotonePiece, lam: float) -> float | None:
    """Unique root of v = lam on a monotone piece, or None if not bracketed."""
    va = float(p.deriv(np.asarray(piece.lo), 0))
    vb = float(p.deriv(np.asarray(piece.hi), 0))
    lo_v, hi_v = min(va, vb), max(va, vb)
    if lam < lo_v or lam > hi_v:
        return None
    if lam == va:
        return piece.lo
    if lam == vb:
        return piece.hi
    f = lambda y: float(p.deriv(np.asarray(y, dtype=float), 0)) - lam
    return float(brentq(f, piece.lo, piece.hi, xtol=ROOT_XTOL))


def level_set_points(p: ShearProfile, lam: float, window,
                     pieces: list[MonotonePiece] | None = None) -> np.ndarray:
    """Sorted roots of v = lam inside the window (at most one per piece)."""
    if pieces is None:
        pieces = find_monotone_pieces(p, window)
    roots = [r for piece in pieces if (r := _root_on_piece(p, piece, lam)) is not None]
    roots.sort()
    out, scale = [], max(1.0, abs(window[1] - window[0]))
    for r in roots:
        if not out or r - out[-1] > 1e-9 * scale:
            out.append(r)
    return np.asarray(out)


def _merge_intervals(intervals, scale: float) -> list[tuple[float, float]]:
    ivs = sorted((a, b) for a, b in intervals if b - a > 0.0)
    merged: list[list[float]] = []
    for a, b in ivs:
        if merged and a <= merged[-1][1] + MERGE_TOL * scale:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _preimage_on_piece(p: ShearProfile, piece: MonotonePiece,
                       lam_lo: float, lam_hi: float) -> tuple[float, float] | None:
    """The interval {y in piece : lam_lo < v(y) < lam_hi} of a monotone piece."""
    va = float(p.deriv(np.asarray(piece.lo), 0))
    vb = float(p.deriv(np.asarray(piece.hi), 0))
    if piece.direction is Direction.UP:
        if va >= lam_hi or vb <= lam_lo:
            return None
        left = piece.lo if va > lam_lo else _root_on_piece(p, piece, lam_lo)
        right = piece.hi if vb < lam_hi else _root_on_piece(p, piece, lam_hi)
    else:
        if va <= lam_lo or vb >= lam_hi:
            return None
        left = piece.lo if va < lam_hi else _root_on_piece(p, piece, lam_hi)
        right = piece.hi if vb > lam_lo else _root_on_piece(p, piece, lam_lo)
    if left is None or right is None or right <= left:
        return None
    return (left, right)


def _is_truncation_edge(p: ShearProfile, window, side: str) -> bool:
    lo, hi = _window_tuple(window)
    if side == "lo":
        return p.domain.a < lo - MERGE_TOL or p.domain.unbounded_left
    return p.domain.b > hi + MERGE_TOL or p.domain.unbounded_right


def _saturation(p: ShearProfile, window, intervals, scale: float) -> bool:
    lo, hi = _window_tuple(window)
    touch_lo = any(a <= lo + MERGE_TOL * scale for a, _ in intervals)
    touch_hi = any(b >= hi - MERGE_TOL * scale for _, b in intervals)
    return (touch_lo and _is_truncation_edge(p, window, "lo")) or \
           (touch_hi and _is_truncation_edge(p, window, "hi"))


def _check_delta(delta: float):
    if not 0.0 < delta < 1.0:
        raise InvalidParamsError(f"delta must lie in (0, 1), got {delta}")


def thickened_intervals(p: ShearProfile, lam: float, delta: float, m: int, window,
                        pieces: list[MonotonePiece] | None = None) -> list[tuple[float, float]]:
    """Interval representation of {y in window : |v(y) - lam| < delta^m}."""
    _check_delta(delta)
    if pieces is None:
        pieces = find_monotone_pieces(p, window)
    dm = delta ** m
    scale = max(1.0, abs(window[1] - window[0]))
    raw = [iv for piece in pieces
           if (iv := _preimage_on_piece(p, piece, lam - dm, lam + dm)) is not None]
    return _merge_intervals(raw, scale)


def thickened_measure(p: ShearProfile, lam: float, delta: float, m: int, window,
                      pieces: list[MonotonePiece] | None = None) -> MeasureResult:
    """Measure of the thickened level set {|v - lam| < delta^m} in the window."""
    ivs = thickened_intervals(p, lam, delta, m, window, pieces)
    scale = max(1.0, abs(window[1] - window[0]))
    return MeasureResult(
        measure=float(sum(b - a for a, b in ivs)),
        intervals=tuple(ivs),
        truncation_saturated=_saturation(p, window, ivs, scale),
    )


def neighborhood_measure(p: ShearProfile, lam: float, delta: float, m: int, window,
                         pieces: list[MonotonePiece] | None = None) -> MeasureResult:
    """Measure of the delta-neighborhood of the thickened level set.

    Each interval is expanded by delta on both sides, overlaps are merged,
    and the union is clipped back to the window (the neighborhood is always
    taken inside the domain truncation).
    """
    ivs = thickened_intervals(p, lam, delta, m, window, pieces)
    lo, hi = _window_tuple(window)
    scale = max(1.0, abs(hi - lo))
    expanded = [(max(lo, a - delta), min(hi, b + delta)) for a, b in ivs]
    merged = _merge_intervals(expanded, scale)
    return MeasureResult(
        measure=float(sum(b - a for a, b in merged)),
        intervals=tuple(merged),
        truncation_saturated=_saturation(p, window, merged, scale),
    )


def measure_sweep(p: ShearProfile, lambda_grid, delta_grid, m: int, window) -> MeasureSweep:
    """Tabulate measures and ratios m(neighborhood)/delta over a (lambda, delta) grid.

    Rows whose sets touch a truncation edge are flagged and excluded from
    the reported sup ratio (their measures are only lower bounds).
    """
    pieces = find_monotone_pieces(p, window)
    rows = []
    sup_ratio = 0.0
    for lam in lambda_grid:
        lam = float(lam)
        roots = level_set_points(p, lam, window, pieces=pieces)
        for delta in delta_grid:
            delta = float(delta)
            thick = thickened_measure(p, lam, delta, m, window, pieces=pieces)
            hood = neighborhood_measure(p, lam, delta, m, window, pieces=pieces)
            ratio = hood.measure / delta
            saturated = thick.truncation_saturated or hood.truncation_saturated
            rows.append(LevelSetReport(
                lam=lam, delta=delta, m=m, roots=tuple(float(r) for r in roots),
                card=int(roots.size), measure_E=thick.measure,
                measure_Ecal=hood.measure, ratio=ratio, saturated=saturated,
            ))
            if not saturated:
                sup_ratio = max(sup_ratio, ratio)
    return MeasureSweep(rows=tuple(rows), sup_ratio=sup_ratio)


def distance_to_intervals(y, intervals) -> np.ndarray:
    """Pointwise distance to a union of closed intervals (inf if empty)."""
    ys = np.asarray(y, dtype=float)
    dist = np.full(ys.shape, np.inf)
    for a, b in intervals:
        d = np.where(ys < a, a - ys, np.where(ys > b, ys - b, 0.0))
        dist = np.minimum(dist, d)
    return dist


def cutoff_chi(p: ShearProfile, lam: float, delta: float, m: int, y, window,
               pieces: list[MonotonePiece] | None = None):
    """Clipped signed distance to the thickened level set, scaled by 1/delta.

    Returns phi(sign(v - lam) * dist(y, E) / delta) with phi the odd clip to
    [-1, 1]; equals sign(v - lam) at distance >= delta, and sign(v - lam)
    everywhere when the set is empty.
    """
    _check_delta(delta)
    ys = np.asarray(y, dtype=float)
    lo, hi = _window_tuple(window)
    if np.any(ys < lo - MERGE_TOL) or np.any(ys > hi + MERGE_TOL):
        raise OutOfDomainError("evaluation points outside the enclosing window")
    ivs = thickened_intervals(p, lam, delta, m, window, pieces)
    sgn = np.sign(p.deriv(ys, 0) - lam)
    if not ivs:
        out = sgn
    else:
        dist = distance_to_intervals(ys, ivs)
        out = np.clip(sgn * dist / delta, -1.0, 1.0)
    return float(out) if np.isscalar(y) or np.ndim(y) == 0 else out
