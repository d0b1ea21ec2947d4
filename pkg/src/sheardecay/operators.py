"""Finite-difference discretization of the shear-mode operator.

H g = -nu g'' + i k (v(y) - lambda) g on a uniform grid, closed with a
symmetric ghost-point Neumann stencil: row 0 reads (nu/h^2)(g0 - g1) and the
last row mirrors it.  With the plain h-weighted inner product this closure
makes the discrete quadratic-form identities exact,

    Re<Hg, g>_h = nu ||D g||_h^2      (accretivity),
    Im<Hg, g>_h = k sum (v_i - lambda) |g_i|^2 h,

so the operator is m-accretive structurally, not approximately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EdgeNotDecayedError,
    InvalidGridError,
    InvalidParamsError,
    LengthMismatchError,
    ZeroVectorError,
)
from .profiles import ShearProfile


@dataclass(frozen=True)
class Grid1D:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise InvalidGridError(f"need at least 3 nodes, got {self.n}")
        if not self.lo < self.hi:
            raise InvalidGridError(f"grid endpoints must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def doubled(self) -> "Grid1D":
        return Grid1D(self.lo, self.hi, 2 * self.n - 1)

    def to_json_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "h": self.h}


@dataclass(frozen=True)
class GridPolicy:
    """How to truncate unbounded domains and pick the node count.

    The spacing target is one tenth (``n_per_layer`` points) of the boundary
    layer width (nu/|k|)^(1/(m+2)); unbounded sides are cut at
    margin_factor * max(1, layer) away from the finite content.  ``window``
    overrides the truncation entirely.
    """

    margin_factor: float = 8.0
    n_per_layer: int = 10
    n_cap: int = 200_000
    n_min: int = 301
    window: tuple[float, float] | None = None


def layer_width(nu: float, k: float, m: int) -> float:
    if k == 0.0:
        return math.inf
    return (nu / abs(k)) ** (1.0 / (m + 2))


def truncate_domain(p: ShearProfile, nu: float, k: float,
                    policy: GridPolicy = GridPolicy()) -> Grid1D:
    """Pick the computational window and node count for (profile, nu, k)."""
    if nu <= 0:
        raise InvalidParamsError("nu must be positive")
    layer = layer_width(nu, k, p.m)
    if policy.window is not None:
        lo, hi = float(policy.window[0]), float(policy.window[1])
        if lo < p.domain.a or hi > p.domain.b:
            raise InvalidGridError("window extends outside the profile domain")
    else:
        reach = policy.margin_factor * max(1.0, layer if math.isfinite(layer) else 1.0)
        lo = p.domain.a if math.isfinite(p.domain.a) else (
            p.domain.b - 2 * reach if math.isfinite(p.domain.b) else -reach)
        hi = p.domain.b if math.isfinite(p.domain.b) else (
            p.domain.a + 2 * reach if math.isfinite(p.domain.a) else reach)
    if math.isfinite(layer):
        n = int(math.ceil((hi - lo) / (layer / policy.n_per_layer))) + 1
    else:
        n = policy.n_min
    n = max(policy.n_min, min(policy.n_cap, n))
    return Grid1D(lo, hi, n)


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    grid: Grid1D
    nu: float
    k: float
    lam: float
    diag: np.ndarray          # complex, length n
    off: np.ndarray           # real, length n-1 (symmetric off-diagonal)

    @property
    def n(self) -> int:
        return self.grid.n

    def bands(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sub, diag, super) bands; sub == super by symmetry."""
        off = self.off.astype(complex)
        return off, self.diag.copy(), off

    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid.to_json_dict(),
            "nu": self.nu, "k": self.k, "lambda": self.lam,
            "diag_re": self.diag.real.tolist(), "diag_im": self.diag.imag.tolist(),
            "off": self.off.tolist(),
        }


def assemble(p: ShearProfile, grid: Grid1D, nu: float, k: float, lam: float = 0.0,
             bc: str = "neumann") -> TridiagonalOperator:
    """Second-order central differences with the symmetric boundary closure.

    ``bc='dirichlet'`` keeps the full 2*nu/h^2 diagonal on the edge rows
    (available for comparison runs, unused by the verification suite).
    """
    if nu <= 0:
        raise InvalidParamsError("nu must be positive")
    if bc not in ("neumann", "dirichlet"):
        raise InvalidParamsError(f"unknown boundary closure {bc!r}")
    y = grid.nodes()
    h = grid.h
    w = nu / (h * h)
    diag = np.full(grid.n, 2.0 * w, dtype=complex)
    if bc == "neumann":
        diag[0] = w
        diag[-1] = w
    diag += 1j * k * (p.deriv(y, 0) - lam)
    off = np.full(grid.n - 1, -w)
    return TridiagonalOperator(grid=grid, nu=nu, k=k, lam=lam, diag=diag, off=off)


def apply(op: TridiagonalOperator, g: np.ndarray) -> np.ndarray:
    """y = H g in O(n); accepts a vector or a stack of column vectors."""
    g = np.asarray(g)
    if g.shape[0] != op.n:
        raise LengthMismatchError(f"vector length {g.shape[0]} != operator size {op.n}")
    out = op.diag[:, None] * g if g.ndim == 2 else op.diag * g
    if g.ndim == 2:
        out[:-1] += op.off[:, None] * g[1:]
        out[1:] += op.off[:, None] * g[:-1]
    else:
        out[:-1] += op.off * g[1:]
        out[1:] += op.off * g[:-1]
    return out


def to_dense(op: TridiagonalOperator) -> np.ndarray:
    if op.n > 4000:
        raise InvalidParamsError("dense assembly capped at n = 4000")
    a = np.diag(op.diag)
    a += np.diag(op.off.astype(complex), 1)
    a += np.diag(op.off.astype(complex), -1)
    return a


# ---------------------------------------------------------------------------
# discrete inner products (plain h-weighted sums; uniform weights keep every
# singular-value and norm ratio identical to the Euclidean ones)


def inner_h(u: np.ndarray, v: np.ndarray, h: float) -> complex:
    """<u, v>_h = h * sum u_i conj(v_i)."""
    return h * complex(np.vdot(v, u))


def norm_h(u: np.ndarray, h: float):
    return math.sqrt(h) * np.linalg.norm(u, axis=0)


def diff_norm_h(u: np.ndarray, h: float):
    """Norm of the forward difference quotient, ||D u||_h."""
    return np.linalg.norm(np.diff(u, axis=0), axis=0) / math.sqrt(h)


@dataclass(frozen=True)
class NumericalRangeResiduals:
    re_residual: float
    im_residual: float


def numerical_range_check(op: TridiagonalOperator, g: np.ndarray) -> NumericalRangeResiduals:
    """Residuals of the two exact quadratic-form identities, relative to ||g||_h^2."""
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != op.n:
        raise LengthMismatchError(f"vector length {g.shape[0]} != operator size {op.n}")
    nrm2 = norm_h(g, op.grid.h) ** 2
    if nrm2 == 0.0:
        raise ZeroVectorError("numerical range check needs a nonzero vector")
    ip = inner_h(apply(op, g), g, op.grid.h)
    re_expected = op.nu * diff_norm_h(g, op.grid.h) ** 2
    vlam = op.diag.imag / op.k if op.k != 0.0 else np.zeros(op.n)
    im_expected = op.k * float(np.sum(vlam * np.abs(g) ** 2)) * op.grid.h
    return NumericalRangeResiduals(
        re_residual=abs(ip.real - re_expected) / nrm2,
        im_residual=abs(ip.imag - im_expected) / nrm2,
    )


def interpolation_inequality_check(g: np.ndarray, grid: Grid1D) -> float:
    """Ratio ||g||_inf^2 / (2 ||g||_h ||D g||_h); at most 1 + O(h) for vectors
    that have decayed at the truncation edges."""
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != grid.n:
        raise LengthMismatchError(f"vector length {g.shape[0]} != grid size {grid.n}")
    peak = float(np.max(np.abs(g)))
    if peak == 0.0:
        raise ZeroVectorError("interpolation check needs a nonzero vector")
    edge = max(abs(complex(g[0])), abs(complex(g[-1])))
    if edge >= 1e-6 * peak:
        raise EdgeNotDecayedError("vector has not decayed at the truncation edges")
    denom = 2.0 * float(norm_h(g, grid.h)) * float(diff_norm_h(g, grid.h))
    return peak ** 2 / denom
