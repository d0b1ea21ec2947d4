"""Shear velocity profiles on one-dimensional cross sections.

A profile is a smooth velocity v(y) on a (possibly unbounded) interval,
carried together with closed-form derivatives, the flatness order m (the
smallest j such that |v'| + ... + |v^(j)| stays positive on the closed
domain), and an optional asymptotic slope hint used by the at-infinity
check.  Profiles are immutable and all operations on them are pure.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptyGridError,
    InvalidParamsError,
    OrderUnavailableError,
    OutOfDomainError,
)

NONDEGENERACY_TOL = 1e-12


class DomainKind(enum.Enum):
    FULL_LINE = "full_line"
    HALF_LINE_LEFT = "half_line_left"    # (-inf, b)
    HALF_LINE_RIGHT = "half_line_right"  # (a, +inf)
    INTERVAL = "interval"


@dataclass(frozen=True)
class DomainSpec:
    """A 1D domain: the full line, a half line, or a bounded interval."""

    kind: DomainKind
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidParamsError(f"domain endpoints must satisfy a < b, got [{self.a}, {self.b}]")
        finite_a, finite_b = math.isfinite(self.a), math.isfinite(self.b)
        expected = {
            DomainKind.FULL_LINE: (False, False),
            DomainKind.HALF_LINE_LEFT: (False, True),
            DomainKind.HALF_LINE_RIGHT: (True, False),
            DomainKind.INTERVAL: (True, True),
        }[self.kind]
        if (finite_a, finite_b) != expected:
            raise InvalidParamsError(f"endpoints [{self.a}, {self.b}] inconsistent with kind {self.kind}")

    @classmethod
    def full_line(cls) -> "DomainSpec":
        return cls(DomainKind.FULL_LINE, -math.inf, math.inf)

    @classmethod
    def interval(cls, a: float, b: float) -> "DomainSpec":
        return cls(DomainKind.INTERVAL, float(a), float(b))

    @classmethod
    def half_line_left(cls, b: float) -> "DomainSpec":
        return cls(DomainKind.HALF_LINE_LEFT, -math.inf, float(b))

    @classmethod
    def half_line_right(cls, a: float) -> "DomainSpec":
        return cls(DomainKind.HALF_LINE_RIGHT, float(a), math.inf)

    @property
    def is_bounded(self) -> bool:
        return self.kind is DomainKind.INTERVAL

    @property
    def unbounded_left(self) -> bool:
        return not math.isfinite(self.a)

    @property
    def unbounded_right(self) -> bool:
        return not math.isfinite(self.b)

    def contains(self, y: float) -> bool:
        """Membership in the closed domain."""
        return self.a <= y <= self.b

    def to_json_dict(self) -> dict:
        return {"kind": self.kind.value, "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class ShearProfile:
    """Velocity profile with exact derivatives.

    ``deriv(y, j)`` evaluates v^(j)(y), vectorized over y, with no domain
    checks (callers inside the package stay within the domain); the checked
    scalar entry point is :func:`eval_profile`.
    """

    name: str
    domain: DomainSpec
    m: int
    deriv_fn: Callable[[np.ndarray, int], np.ndarray] = field(repr=False)
    m_max: int = 64
    c0_hint: float | None = None

    def deriv(self, y, order: int = 0):
        ys = np.asarray(y, dtype=float)
        return np.asarray(self.deriv_fn(ys, int(order)), dtype=float)

    def value(self, y):
        return self.deriv(y, 0)


def eval_profile(p: ShearProfile, y: float, order: int = 0) -> float:
    """Evaluate v^(order)(y) with domain and order checks."""
    if order < 0 or order > p.m_max:
        raise OrderUnavailableError(f"order {order} unavailable for profile {p.name} (max {p.m_max})")
    if not p.domain.contains(y):
        raise OutOfDomainError(f"y={y} outside domain [{p.domain.a}, {p.domain.b}] of {p.name}")
    return float(p.deriv(np.asarray(y, dtype=float), order))


# ---------------------------------------------------------------------------
# built-in profiles


def couette(domain: DomainSpec | None = None) -> ShearProfile:
    """v(y) = y; simple slope 1 everywhere."""
    def deriv(y, j):
        if j == 0:
            return y
        if j == 1:
            return np.ones_like(y)
        return np.zeros_like(y)
    return ShearProfile("couette", domain or DomainSpec.full_line(), m=1, deriv_fn=deriv, c0_hint=1.0)


def poiseuille(domain: DomainSpec | None = None) -> ShearProfile:
    """v(y) = y^2; one quadratic flat point at the origin."""
    def deriv(y, j):
        if j == 0:
            return y * y
        if j == 1:
            return 2.0 * y
        if j == 2:
            return np.full_like(y, 2.0)
        return np.zeros_like(y)
    return ShearProfile("poiseuille", domain or DomainSpec.interval(-1.0, 1.0), m=2, deriv_fn=deriv)


def kolmogorov() -> ShearProfile:
    """v(y) = sin y on [0, 2*pi]; quadratic flat points at the two extrema."""
    cycle = (np.sin, np.cos, lambda y: -np.sin(y), lambda y: -np.cos(y))
    def deriv(y, j):
        return cycle[j % 4](y)
    return ShearProfile("kolmogorov", DomainSpec.interval(0.0, 2.0 * np.pi), m=2, deriv_fn=deriv)


def monomial(degree: int, domain: DomainSpec | None = None) -> ShearProfile:
    """v(y) = y^degree; flat point of order ``degree`` at the origin."""
    if degree < 1:
        raise InvalidParamsError("monomial degree must be >= 1")
    def deriv(y, j):
        if j > degree:
            return np.zeros_like(y)
        coef = math.factorial(degree) / math.factorial(degree - j)
        return coef * y ** (degree - j)
    return ShearProfile(f"monomial{degree}", domain or DomainSpec.full_line(), m=degree, deriv_fn=deriv)


def taylor_couette() -> ShearProfile:
    """v(y) = 1/y^2 on (1, inf); slope decays at infinity (negative control)."""
    def deriv(y, j):
        sign = -1.0 if j % 2 else 1.0
        return sign * math.factorial(j + 1) * y ** (-(j + 2))
    return ShearProfile("taylor_couette", DomainSpec.half_line_right(1.0), m=1, deriv_fn=deriv)


_TANH_POLYS: list[np.polynomial.Polynomial] = [np.polynomial.Polynomial([0.0, 1.0])]


def _tanh_poly(j: int) -> np.polynomial.Polynomial:
    # v^(j) = P_j(tanh y) with P_{j+1} = P_j' * (1 - t^2)
    one_minus_t2 = np.polynomial.Polynomial([1.0, 0.0, -1.0])
    while len(_TANH_POLYS) <= j:
        _TANH_POLYS.append(_TANH_POLYS[-1].deriv() * one_minus_t2)
    return _TANH_POLYS[j]


def tanh_profile() -> ShearProfile:
    """v(y) = tanh y; slope sech^2 vanishes at infinity (negative control)."""
    def deriv(y, j):
        return _tanh_poly(j)(np.tanh(y))
    return ShearProfile("tanh", DomainSpec.full_line(), m=1, deriv_fn=deriv, m_max=16)


def polynomial_profile(coeffs: Sequence[float], domain: DomainSpec, m: int | None = None,
                       name: str = "poly") -> ShearProfile:
    """Custom profile from polynomial coefficients (low order first)."""
    poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    degree = max(1, poly.degree())
    derivs = [poly]
    for _ in range(degree):
        derivs.append(derivs[-1].deriv())
    def deriv(y, j):
        if j > degree:
            return np.zeros_like(y)
        return derivs[j](y)
    return ShearProfile(name, domain, m=m if m is not None else degree, deriv_fn=deriv)


def builtin_profiles() -> list[ShearProfile]:
    """The registered built-ins (monomials at odd degrees 3 and 5)."""
    return [
        couette(),
        poiseuille(),
        poiseuille(DomainSpec.full_line()),
        kolmogorov(),
        monomial(3),
        monomial(5),
        taylor_couette(),
        tanh_profile(),
    ]


# ---------------------------------------------------------------------------
# non-degeneracy checks


@dataclass(frozen=True)
class NondegeneracyReport:
    min_sum: float
    witness_y: float
    passed: bool


def check_nondegeneracy(p: ShearProfile, grid, m: int | None = None,
                        tol: float = NONDEGENERACY_TOL) -> NondegeneracyReport:
    """Minimum over the grid of sum_{j=1..m} |v^(j)(y)|.

    Passes when the minimum exceeds ``tol``; the witness is the grid point
    attaining it.
    """
    ys = np.asarray(grid, dtype=float)
    if ys.size == 0:
        raise EmptyGridError("non-degeneracy check needs a nonempty grid")
    if np.any(ys < p.domain.a) or np.any(ys > p.domain.b):
        raise OutOfDomainError("grid points outside the profile domain")
    order = p.m if m is None else int(m)
    total = np.zeros_like(ys)
    for j in range(1, order + 1):
        total += np.abs(p.deriv(ys, j))
    i = int(np.argmin(total))
    return NondegeneracyReport(min_sum=float(total[i]), witness_y=float(ys[i]),
                               passed=bool(total[i] > tol))


class Trend(enum.Enum):
    INCREASING = "increasing"
    FLAT = "flat"
    VANISHING = "vanishing"


@dataclass(frozen=True)
class InfinityReport:
    liminf_estimate: float
    trend: Trend
    passed: bool


def check_infinity_nondegeneracy(p: ShearProfile, probe_radii,
                                 tol: float = NONDEGENERACY_TOL) -> InfinityReport:
    """Finite proxy for the liminf of |v'| at infinity.

    Each radius r contributes a probe shell ({-r, +r} intersected with the
    unbounded sides); the estimate is the shell minimum of |v'| on the
    outermost shell, and the trend compares outermost to innermost shell.
    Vacuous (passes) on bounded domains.
    """
    if p.domain.is_bounded:
        return InfinityReport(liminf_estimate=math.inf, trend=Trend.FLAT, passed=True)
    radii = sorted(float(r) for r in probe_radii)
    if not radii:
        raise EmptyGridError("need at least one probe radius")
    shell_mins = []
    for r in radii:
        pts = []
        if p.domain.unbounded_right:
            pts.append(r)
        if p.domain.unbounded_left:
            pts.append(-r)
        for y in pts:
            if not p.domain.contains(y):
                raise OutOfDomainError(f"probe point {y} outside domain of {p.name}")
        shell_mins.append(min(abs(float(p.deriv(np.asarray(y), 1))) for y in pts))
    first, last = shell_mins[0], shell_mins[-1]
    if last <= 0.5 * first:
        trend = Trend.VANISHING
    elif last >= 2.0 * first:
        trend = Trend.INCREASING
    else:
        trend = Trend.FLAT
    estimate = last
    # A vanishing trend fails regardless of the current shell value: the
    # proxy is asked whether the slope stays bounded away from zero.
    if trend is Trend.VANISHING:
        passed = False
    elif p.c0_hint is not None:
        passed = estimate >= p.c0_hint * (1.0 - 1e-12)
    else:
        passed = estimate > tol
    return InfinityReport(liminf_estimate=estimate, trend=trend, passed=passed)
