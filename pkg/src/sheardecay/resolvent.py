"""Resolvent norms along the imaginary axis and the pseudospectral abscissa.

The resolvent norm at z = i*k*lambda is 1/sigma_min(H_lambda), so the
abscissa is the minimum over lambda of the smallest singular value.
sigma_min comes from inverse iteration on the normal equations: one pivoted
LU of the tridiagonal matrix (LAPACK gttrf, bandwidth grows to 2 under
pivoting) serves both the solve with H and the solve with its adjoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, svdvals

from .errors import (
    InvalidParamsError,
    LengthMismatchError,
    NoConvergenceError,
    ZeroVectorError,
)
from .levelset import (
    cutoff_chi,
    distance_to_intervals,
    neighborhood_measure,
    thickened_intervals,
)
from .operators import (
    Grid1D,
    GridPolicy,
    TridiagonalOperator,
    apply,
    assemble,
    diff_norm_h,
    norm_h,
    truncate_domain,
)
from .profiles import ShearProfile

DENSE_FALLBACK_N = 2000
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _dense_sigma_min(dl, d, du) -> float:
    a = np.diag(d) + np.diag(du, 1) + np.diag(dl, -1)
    return float(svdvals(a)[-1])


def sigma_min_tridiag(dl, d, du, tol: float = 1e-11, max_iter: int = 400,
                      seed: int = 0, dense_fallback: bool = True) -> float:
    """Smallest singular value of a complex tridiagonal matrix.

    Inverse iteration on A^H A via alternating adjoint/forward solves with a
    single pivoted factorization; converged when successive Rayleigh
    estimates agree to ``tol`` relative.  An exactly singular factorization
    (or an estimate underflowing 1e-300) returns 0.  On stagnation the dense
    bidiagonalization oracle takes over for n <= 2000, otherwise the call
    raises NoConvergenceError.
    """
    d = np.asarray(d, dtype=complex)
    n = d.shape[0]
    if n == 1:
        return abs(complex(d[0]))
    dl = np.asarray(dl, dtype=complex)
    du = np.asarray(du, dtype=complex)
    if n == 2:
        # below the LAPACK tridiagonal wrapper's minimum size
        return _dense_sigma_min(dl, d, du)
    gttrf, gttrs = get_lapack_funcs(("gttrf", "gttrs"), (d,))
    dlf, df, duf, du2, ipiv, info = gttrf(dl, d, du)
    if info > 0:
        return 0.0
    rng = np.random.Generator(np.random.PCG64(seed))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)

    def matvec(x):
        y = d * x
        y[:-1] += du * x[1:]
        y[1:] += dl * x[:-1]
        return y

    prev = math.inf
    est = math.inf
    rel = math.inf
    for _ in range(max_iter):
        w, _info = gttrs(dlf, df, duf, du2, ipiv, v, trans="C")
        u, _info = gttrs(dlf, df, duf, du2, ipiv, w)
        nrm = np.linalg.norm(u)
        if not np.isfinite(nrm) or nrm == 0.0:
            return 0.0
        v = u / nrm
        est = float(np.linalg.norm(matvec(v)))
        if est < 1e-300:
            return 0.0
        rel = abs(est - prev) / est
        if rel <= tol:
            return est
        prev = est
    # Stagnation at a cluster of nearly equal singular values still pins the
    # value itself; accept it.  Anything slower falls back or fails loudly.
    if rel <= math.sqrt(tol):
        return est
    if dense_fallback and n <= DENSE_FALLBACK_N:
        return _dense_sigma_min(dl, d, du)
    raise NoConvergenceError(f"sigma_min stalled after {max_iter} iterations (rel change {rel:.2e})")


def smallest_singular_value(op: TridiagonalOperator, tol: float = 1e-11,
                            max_iter: int = 400, seed: int = 0) -> float:
    return sigma_min_tridiag(*op.bands(), tol=tol, max_iter=max_iter, seed=seed)


@dataclass(frozen=True, eq=False)
class ResolventScan:
    lambdas: np.ndarray
    sigmas: np.ndarray                 # NaN where the solver failed
    errors: tuple[tuple[float, str], ...] = ()


def resolvent_profile(p: ShearProfile, nu: float, k: float, lambda_grid,
                      policy: GridPolicy = GridPolicy(), grid: Grid1D | None = None,
                      tol: float = 1e-11, max_iter: int = 400, seed: int = 0) -> ResolventScan:
    """sigma_min along a sorted grid of levels; per-point failures are recorded."""
    lams = np.asarray(lambda_grid, dtype=float)
    if np.any(np.diff(lams) < 0):
        raise InvalidParamsError("lambda grid must be sorted")
    if grid is None:
        grid = truncate_domain(p, nu, k, policy)
    sigmas = np.empty(lams.shape)
    errors = []
    for i, lam in enumerate(lams):
        try:
            op = assemble(p, grid, nu, k, float(lam))
            sigmas[i] = smallest_singular_value(op, tol=tol, max_iter=max_iter, seed=seed)
        except NoConvergenceError as exc:
            sigmas[i] = np.nan
            errors.append((float(lam), str(exc)))
    return ResolventScan(lambdas=lams, sigmas=sigmas, errors=tuple(errors))


@dataclass(frozen=True)
class PsiSearch:
    coarse_points: int = 512
    refine_tol: float = 1e-5          # golden-section bracket, fraction of scan span
    sigma_tol: float = 1e-11
    max_iter: int = 400
    seed: int = 0
    margin: float | None = None       # default 2 * rate_target / |k|
    doubling_check: bool = True
    max_refinements: int = 24


@dataclass(frozen=True, eq=False)
class PsiEstimate:
    psi: float
    lambda_star: float
    scan: tuple[tuple[float, float], ...]
    refined: bool
    grid_converged: bool
    psi_doubled: float
    grid: Grid1D
    profile_name: str
    nu: float
    k: float

    def to_json_dict(self) -> dict:
        return {
            "psi": self.psi,
            "lambda_star": self.lambda_star,
            "grid_converged": self.grid_converged,
            "psi_doubled": self.psi_doubled,
            "refined": self.refined,
            "profile": self.profile_name,
            "nu": self.nu,
            "k": self.k,
            "n": self.grid.n,
        }


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def pseudospectral_abscissa(p: ShearProfile, nu: float, k: float,
                            search: PsiSearch = PsiSearch(),
                            policy: GridPolicy = GridPolicy()) -> PsiEstimate:
    """Minimize sigma_min over the level parameter.

    Coarse scan over [min v - margin, max v + margin], golden-section
    refinement around every coarse local minimum, then a doubling check: the
    refinement is repeated on the 2n-1 grid near the minimizer and the
    estimate is flagged converged when the two values agree within 1%.
    """
    grid = truncate_domain(p, nu, k, policy)

    def sig(g: Grid1D, lam: float) -> float:
        op = assemble(p, g, nu, k, lam)
        return sigma_min_tridiag(*op.bands(), tol=search.sigma_tol,
                                 max_iter=search.max_iter, seed=search.seed)

    if k == 0.0:
        # degenerate test path: z = i*k*lambda collapses to z = 0
        s = sig(grid, 0.0)
        return PsiEstimate(psi=s, lambda_star=0.0, scan=((0.0, s),), refined=False,
                           grid_converged=True, psi_doubled=s, grid=grid,
                           profile_name=p.name, nu=nu, k=k)

    from .sweep import rate_target  # leaf formula lives with the sweep module

    vv = p.deriv(grid.nodes(), 0)
    margin = search.margin if search.margin is not None else 2.0 * rate_target(nu, k, p.m) / abs(k)
    lo, hi = float(vv.min()) - margin, float(vv.max()) + margin
    lams = np.linspace(lo, hi, search.coarse_points)
    span = hi - lo
    sigmas = np.array([sig(grid, float(lam)) for lam in lams])
    scan = tuple(zip(lams.tolist(), sigmas.tolist()))

    finite = np.where(np.isfinite(sigmas))[0]
    if finite.size == 0:
        raise NoConvergenceError("every coarse scan point failed")
    padded = np.nan_to_num(sigmas, nan=math.inf)   # failed points never block a minimum
    minima = []
    for i in finite:
        left = padded[i - 1] if i > 0 else math.inf
        right = padded[i + 1] if i < len(lams) - 1 else math.inf
        if padded[i] <= left and padded[i] <= right:
            minima.append(i)
    minima.sort(key=lambda i: sigmas[i])
    minima = minima[: search.max_refinements]

    xtol = max(search.refine_tol * span, 1e-13 * max(1.0, abs(lo), abs(hi)))
    best_lam, best_sig = float(lams[minima[0]]), float(sigmas[minima[0]])
    for i in minima:
        a = float(lams[max(i - 1, 0)])
        b = float(lams[min(i + 1, len(lams) - 1)])
        lam_r, sig_r = _golden_min(lambda lam: sig(grid, lam), a, b, xtol)
        if sig_r < best_sig:
            best_lam, best_sig = lam_r, sig_r

    psi_doubled = math.nan
    converged = False
    if search.doubling_check:
        g2 = grid.doubled()
        spacing = span / (search.coarse_points - 1)
        _, psi_doubled = _golden_min(lambda lam: sig(g2, lam),
                                     best_lam - spacing, best_lam + spacing, xtol)
        psi_doubled = min(psi_doubled, sig(g2, best_lam))
        converged = best_sig > 0 and abs(psi_doubled - best_sig) < 0.01 * best_sig

    return PsiEstimate(psi=best_sig, lambda_star=best_lam, scan=scan, refined=True,
                       grid_converged=converged, psi_doubled=psi_doubled, grid=grid,
                       profile_name=p.name, nu=nu, k=k)


# ---------------------------------------------------------------------------
# certificate: the quadratic-form inequality chain behind the abscissa bound


@dataclass(frozen=True)
class CertificateReport:
    ineq_imaginary: bool
    ineq_outside: bool
    ineq_inside: bool
    ineq_full: bool
    slack: dict[str, float]
    measure_neighborhood: float

    @property
    def all_hold(self) -> bool:
        return self.ineq_imaginary and self.ineq_outside and self.ineq_inside and self.ineq_full


def resolvent_certificate(p: ShearProfile, nu: float, k: float, lam: float,
                          delta: float, m: int, g: np.ndarray,
                          grid: Grid1D | None = None,
                          policy: GridPolicy = GridPolicy()) -> CertificateReport:
    """Evaluate the four two-sided estimates tying ||Hg|| to ||g||.

    With chi the clipped signed-distance cutoff, E the thickened level set
    and N its delta-neighborhood (measure mN), the checked displays are

      imaginary:  |k| <chi (v-lam) g, g>  <=  ||Hg|| ||g|| + (nu/delta) ||Dg|| ||g||
      outside:    int_{off N} |g|^2  <=  |k|^-1 d^-m ||Hg|| ||g||
                                        + nu^1/2 |k|^-1 d^-m-1 ||Hg||^1/2 ||g||^3/2
      inside:     int_N |g|^2  <=  2 nu^-1/2 mN ||Hg||^1/2 ||g||^3/2
      full:       ||g||^2 <= 2 (|k|^-1 d^-m + nu |k|^-2 d^-2m-2 + 4 nu^-1 mN^2)
                             * ||Hg|| ||g||

    (the full form carries the explicit constants obtained by applying the
    arithmetic-geometric mean inequality to the outside+inside splitting).
    Booleans allow a 1e-8 relative slack; slacks are (rhs - lhs)/rhs.
    """
    if k == 0.0:
        raise InvalidParamsError("certificate needs k != 0")
    if grid is None:
        grid = truncate_domain(p, nu, k, policy)
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != grid.n:
        raise LengthMismatchError(f"vector length {g.shape[0]} != grid size {grid.n}")
    if float(np.linalg.norm(g)) == 0.0:
        raise ZeroVectorError("certificate needs a nonzero vector")

    y = grid.nodes()
    h = grid.h
    window = (grid.lo, grid.hi)
    op = assemble(p, grid, nu, k, lam)
    hg = apply(op, g)
    ng = float(norm_h(g, h))
    nhg = float(norm_h(hg, h))
    ndg = float(diff_norm_h(g, h))

    ivs = thickened_intervals(p, lam, delta, m, window)
    hood = neighborhood_measure(p, lam, delta, m, window)
    chi = cutoff_chi(p, lam, delta, m, y, window)
    vlam = p.deriv(y, 0) - lam
    inside = distance_to_intervals(y, ivs) < delta if ivs else np.zeros(y.shape, dtype=bool)
    g2 = np.abs(g) ** 2
    mN = hood.measure
    dm = delta ** m

    lhs_im = abs(k) * float(np.sum(chi * vlam * g2)) * h
    rhs_im = nhg * ng + (nu / delta) * ndg * ng

    lhs_out = float(np.sum(g2[~inside])) * h
    rhs_out = (dm ** -1 / abs(k)) * nhg * ng + \
        math.sqrt(nu) / abs(k) * delta ** (-m - 1) * math.sqrt(nhg) * ng ** 1.5

    lhs_in = float(np.sum(g2[inside])) * h
    rhs_in = 2.0 / math.sqrt(nu) * mN * math.sqrt(nhg) * ng ** 1.5

    lhs_full = ng ** 2
    rhs_full = 2.0 * (dm ** -1 / abs(k) + nu / (k * k) * delta ** (-2 * m - 2)
                      + 4.0 / nu * mN ** 2) * nhg * ng

    eps = 1e-8
    def ok(lhs, rhs):
        return lhs <= rhs * (1.0 + eps)
    def slack(lhs, rhs):
        return (rhs - lhs) / rhs if rhs > 0 else (0.0 if lhs == 0.0 else -math.inf)

    return CertificateReport(
        ineq_imaginary=ok(lhs_im, rhs_im),
        ineq_outside=ok(lhs_out, rhs_out),
        ineq_inside=ok(lhs_in, rhs_in),
        ineq_full=ok(lhs_full, rhs_full),
        slack={
            "imaginary": slack(lhs_im, rhs_im),
            "outside": slack(lhs_out, rhs_out),
            "inside": slack(lhs_in, rhs_in),
            "full": slack(lhs_full, rhs_full),
        },
        measure_neighborhood=mN,
    )
