"""The full verification suite: ten desk-scale checks of the decay theory.

Each criterion is a standalone function returning a `CriterionResult`; the
command-line `verify-all` and the pytest acceptance module both run these,
so there is exactly one implementation of every tolerance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .levelset import cutoff_chi, distance_to_intervals, measure_sweep, thickened_intervals
from .operators import (
    Grid1D,
    apply,
    assemble,
    diff_norm_h,
    interpolation_inequality_check,
    norm_h,
    truncate_domain,
)
from .profiles import DomainSpec, ShearProfile, couette, kolmogorov, monomial, poiseuille, taylor_couette
from .resolvent import (
    PsiSearch,
    pseudospectral_abscissa,
    resolvent_certificate,
    sigma_min_tridiag,
)
from .semigroup import NormDecayConfig, check_wei_bound, operator_norm_decay
from .sweep import (
    Regime,
    SweepConfig,
    TensorConfig,
    counterexample_scan,
    fit_scaling,
    psi_sweep,
    rate_target,
    tensor_rate,
)

NU_GRID = (1e-2, 1e-3, 1e-4, 1e-5)
BRIDGE_NU, BRIDGE_K = 1e-3, 1.0


@dataclass(frozen=True)
class CriterionResult:
    index: int
    key: str
    passed: bool
    details: dict
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{self.index:2d}/10] {status}  {self.key}  ({self.elapsed:.1f}s)"


def _sweep_config(seed: int, workers: int | None) -> SweepConfig:
    return SweepConfig(search=PsiSearch(seed=seed), workers=workers)


def _bridge_profiles() -> list[ShearProfile]:
    # the profiles whose scaling grids contain the point (nu=1e-3, k=1)
    return [couette(), poiseuille(), kolmogorov()]


def criterion_1(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Enhanced-dissipation exponent in nu for the linear profile (m=1)."""
    t0 = time.time()
    table = psi_sweep(couette(), NU_GRID, [1.0], _sweep_config(seed, workers))
    converged = all(r.grid_converged for r in table.rows)
    fit = fit_scaling(table, Regime.ENHANCED)
    passed = converged and abs(fit.exponent_nu - 1.0 / 3.0) <= 0.03
    details = {"exponent_nu": fit.exponent_nu, "target": 1.0 / 3.0, "tol": 0.03,
               "prefactor": fit.prefactor, "r_squared": fit.r_squared,
               "all_converged": converged,
               "psi": {f"{r.nu:g}": r.psi for r in table.rows}}
    return CriterionResult(1, "enhanced-exponent-m1", passed, details, time.time() - t0)


def criterion_2(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Enhanced-dissipation exponent in nu for the two m=2 profiles."""
    t0 = time.time()
    details = {}
    passed = True
    for p in (poiseuille(), kolmogorov()):
        table = psi_sweep(p, NU_GRID, [1.0], _sweep_config(seed, workers))
        converged = all(r.grid_converged for r in table.rows)
        fit = fit_scaling(table, Regime.ENHANCED)
        ok = converged and abs(fit.exponent_nu - 0.5) <= 0.05
        passed = passed and ok
        details[p.name] = {"exponent_nu": fit.exponent_nu, "target": 0.5, "tol": 0.05,
                           "all_converged": converged, "r_squared": fit.r_squared}
    return CriterionResult(2, "enhanced-exponent-m2", passed, details, time.time() - t0)


def criterion_3(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Wavenumber exponent in the enhanced regime."""
    t0 = time.time()
    table = psi_sweep(couette(), [1e-4], [0.25, 0.5, 1.0, 2.0, 4.0],
                      _sweep_config(seed, workers))
    converged = all(r.grid_converged for r in table.rows)
    fit = fit_scaling(table, Regime.ENHANCED)
    passed = converged and abs(fit.exponent_k - 2.0 / 3.0) <= 0.05
    details = {"exponent_k": fit.exponent_k, "target": 2.0 / 3.0, "tol": 0.05,
               "all_converged": converged,
               "psi": {f"{r.k:g}": r.psi for r in table.rows}}
    return CriterionResult(3, "enhanced-exponent-k", passed, details, time.time() - t0)


def criterion_4(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Joint (k, nu) exponents in the low-frequency dispersion regime."""
    t0 = time.time()
    table = psi_sweep(poiseuille(), [1.0, 2.0, 4.0], [0.02, 0.05, 0.1, 0.2],
                      _sweep_config(seed, workers))
    converged = all(r.grid_converged for r in table.rows)
    fit = fit_scaling(table, Regime.TAYLOR)
    passed = (converged and abs(fit.exponent_k - 2.0) <= 0.1
              and abs(fit.exponent_nu + 1.0) <= 0.15)
    details = {"exponent_k": fit.exponent_k, "exponent_nu": fit.exponent_nu,
               "targets": {"k": 2.0, "nu": -1.0}, "tols": {"k": 0.1, "nu": 0.15},
               "all_converged": converged, "r_squared": fit.r_squared}
    return CriterionResult(4, "taylor-dispersion-exponents", passed, details, time.time() - t0)


def grid_measure_oracle(p: ShearProfile, lam: float, delta: float, m: int,
                        window, points: int = 10 ** 6,
                        values: np.ndarray | None = None) -> tuple[float, float]:
    """Brute-force indicator measures of the thickened set and its
    delta-neighborhood on a midpoint grid; the independent check for the
    piecewise-analytic route.  ``values`` may carry precomputed v at the
    midpoints to amortize the profile evaluation across a sweep.

    The thickened-set count is accurate to one cell per interval.  The
    neighborhood is obtained by dilating each run of marked cells by
    round(delta/cell), which is accurate to about a cell per interval side
    but is blind to intervals thinner than a cell (no sampled indicator can
    see them); callers must restrict the neighborhood comparison to rows
    whose intervals the grid resolves."""
    lo, hi = float(window[0]), float(window[1])
    cell = (hi - lo) / points
    if values is None:
        values = p.deriv(lo + (np.arange(points) + 0.5) * cell, 0)
    inside = np.abs(values - lam) < delta ** m
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


_LEVELSET_CASES = (
    ("couette", (-3.0, 3.0)),
    ("poiseuille", None),
    ("kolmogorov", None),
    ("monomial3", (-1.5, 1.5)),
)


def _levelset_profile(name: str) -> ShearProfile:
    return {"couette": couette, "poiseuille": poiseuille,
            "kolmogorov": kolmogorov, "monomial3": lambda: monomial(3)}[name]()


def criterion_5(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Level-set measure bound: stable sup ratios and oracle agreement."""
    t0 = time.time()
    deltas = (0.2, 0.1, 0.05, 0.025, 0.0125)
    oracle_points = 10 ** 6
    details = {}
    passed = True
    for name, window in _LEVELSET_CASES:
        p = _levelset_profile(name)
        if window is None:
            window = (p.domain.a, p.domain.b)
        vv = p.deriv(np.linspace(window[0], window[1], 4001), 0)
        lams = np.linspace(float(vv.min()) - 0.5, float(vv.max()) + 0.5, 61)
        sweep = measure_sweep(p, lams, deltas, p.m, window)
        sup_by_delta = {}
        for d in deltas:
            vals = [r.ratio for r in sweep.rows if r.delta == d and not r.saturated]
            sup_by_delta[d] = max(vals) if vals else 0.0
        stable = True
        sups = [sup_by_delta[d] for d in deltas]
        for a, b in zip(sups[:-1], sups[1:]):
            if a > 0 and b > 0:
                stable = stable and max(a / b, b / a) <= 1.5
            elif a != b:
                stable = False
        cell = (window[1] - window[0]) / oracle_points
        midpoints = window[0] + (np.arange(oracle_points) + 0.5) * cell
        mid_values = p.deriv(midpoints, 0)
        worst_e = 0.0
        worst_n = 0.0
        for r in sweep.rows:
            m_e, m_n = grid_measure_oracle(p, r.lam, r.delta, r.m, window,
                                           oracle_points, values=mid_values)
            worst_e = max(worst_e, abs(m_e - r.measure_E) / cell)
            ivs = thickened_intervals(p, r.lam, r.delta, r.m, window)
            if all(b - a >= 3 * cell for a, b in ivs):
                worst_n = max(worst_n, abs(m_n - r.measure_Ecal) / cell)
        # thickened-set measures at the stated two cells; the neighborhood at
        # the dilation oracle's own accuracy (about a cell per interval side)
        # and only on rows whose intervals the oracle grid can resolve
        ok = stable and worst_e <= 2.0 + 1e-9 and worst_n <= 4.0 + 1e-9
        passed = passed and ok
        details[name] = {"sup_ratios": sups, "stable": stable,
                         "worst_oracle_cells_thickened": worst_e,
                         "worst_oracle_cells_neighborhood": worst_n}
    return CriterionResult(5, "levelset-measure-bound", passed, details, time.time() - t0)


def criterion_6(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """The uniform gap disappears when the slope dies at infinity."""
    t0 = time.time()
    Ls = [10.0, 20.0, 40.0, 80.0]
    search = PsiSearch(seed=seed, doubling_check=False)
    scan = counterexample_scan(taylor_couette(), 1e-3, 1.0, Ls, search=search)
    psis = scan.psis()
    decreasing = bool(np.all(np.diff(psis) < 0))
    halved = psis[-1] <= psis[0] / 2.0
    control = counterexample_scan(couette(), 1e-3, 1.0, Ls, search=search)
    cpsis = control.psis()
    control_stable = cpsis[-1] / cpsis[-2] >= 0.9
    passed = bool(decreasing and halved and control_stable)
    details = {"psi_by_L": dict(zip(map(str, Ls), psis.tolist())),
               "control_psi_by_L": dict(zip(map(str, Ls), cpsis.tolist())),
               "strictly_decreasing": decreasing, "halved": bool(halved),
               "control_ratio": float(cpsis[-1] / cpsis[-2])}
    return CriterionResult(6, "no-gap-counterexample", passed, details, time.time() - t0)


def criterion_7(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Abscissa-to-semigroup bridge at the common acceptance point."""
    t0 = time.time()
    details = {}
    passed = True
    for p in _bridge_profiles():
        est = pseudospectral_abscissa(p, BRIDGE_NU, BRIDGE_K, search=PsiSearch(seed=seed))
        series = operator_norm_decay(p, BRIDGE_NU, BRIDGE_K,
                                     config=NormDecayConfig(seed=seed))
        wei = check_wei_bound(series, est, slack=0.02)
        rate_ok = series.fitted_rate >= 0.98 * est.psi
        ok = wei.holds and rate_ok and est.grid_converged
        passed = passed and ok
        details[p.name] = {"psi": est.psi, "fitted_rate": series.fitted_rate,
                           "bound_holds": wei.holds, "worst_slack": wei.worst_slack,
                           "rate_ok": rate_ok, "grid_converged": est.grid_converged}
    return CriterionResult(7, "wei-semigroup-bridge", passed, details, time.time() - t0)


def criterion_8(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Iterative smallest singular value against the dense oracle."""
    t0 = time.time()
    rng = np.random.Generator(np.random.PCG64(seed + 8))
    worst = 0.0
    for trial in range(200):
        n = int(rng.integers(3, 201))
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        dl = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        du = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        dense = float(svdvals(np.diag(d) + np.diag(du, 1) + np.diag(dl, -1))[-1])
        it = sigma_min_tridiag(dl, d, du, tol=1e-12, max_iter=2000, seed=trial)
        worst = max(worst, abs(it - dense) / dense)
    passed = worst <= 1e-8
    return CriterionResult(8, "sigma-min-oracle", passed,
                           {"worst_rel_err": worst, "tol": 1e-8, "trials": 200},
                           time.time() - t0)


def _random_smooth_bumps(rng: np.random.Generator, y: np.ndarray, count: int) -> np.ndarray:
    """Batch of random smooth, edge-decayed complex vectors (columns)."""
    n = y.shape[0]
    out = np.zeros((n, count), dtype=complex)
    for j in range(count):
        for _ in range(3):
            amp = rng.standard_normal() + 1j * rng.standard_normal()
            center = rng.uniform(-3.0, 3.0)
            width = rng.uniform(0.6, 1.2)
            out[:, j] += amp * np.exp(-(((y - center) / width) ** 2))
    return out


def criterion_9(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Structural identities: accretivity, quadratic-form residuals, cutoff
    properties, the sup-interpolation ratio, and the certificate chain."""
    t0 = time.time()
    rng = np.random.Generator(np.random.PCG64(seed + 9))
    details = {}
    passed = True

    for p in _bridge_profiles():
        nu, k = BRIDGE_NU, BRIDGE_K
        grid = truncate_domain(p, nu, k)
        y = grid.nodes()
        h = grid.h
        vv = p.deriv(y, 0)
        delta = (nu / abs(k)) ** (1.0 / (p.m + 2))
        est = pseudospectral_abscissa(p, nu, k, search=PsiSearch(seed=seed))
        lam_star = est.lambda_star
        lam_mid = 0.5 * (float(vv.min()) + float(vv.max()))

        # (a) accretivity and numerical-range identities, 1e3 random vectors
        worst_acc = 0.0
        worst_re = worst_im = 0.0
        for lam in (lam_star, lam_mid, float(vv.max()) + 0.1):
            op = assemble(p, grid, nu, k, lam)
            G = rng.standard_normal((grid.n, 1000)) + 1j * rng.standard_normal((grid.n, 1000))
            HG = apply(op, G)
            nrm2 = norm_h(G, h) ** 2
            ips = h * np.sum(HG * np.conj(G), axis=0)
            worst_acc = max(worst_acc, float(np.max(-ips.real / nrm2)))
            re_exp = nu * diff_norm_h(G, h) ** 2
            im_exp = k * h * np.sum((vv - lam)[:, None] * np.abs(G) ** 2, axis=0)
            worst_re = max(worst_re, float(np.max(np.abs(ips.real - re_exp) / nrm2)))
            worst_im = max(worst_im, float(np.max(np.abs(ips.imag - im_exp) / nrm2)))
        identities_ok = worst_acc <= 1e-12 and worst_re <= 1e-12 and worst_im <= 1e-12

        # (b) cutoff function properties on 1e4 random points per level
        chi_ok = True
        for lam in (lam_star, lam_mid):
            ys = np.sort(rng.uniform(grid.lo, grid.hi, 10 ** 4))
            chi = cutoff_chi(p, lam, delta, p.m, ys, (grid.lo, grid.hi))
            vlam = p.deriv(ys, 0) - lam
            ivs = thickened_intervals(p, lam, delta, p.m, (grid.lo, grid.hi))
            off_hood = distance_to_intervals(ys, ivs) >= delta if ivs else np.ones(ys.shape, bool)
            gaps = np.diff(ys)
            spaced = gaps > 1e-12
            quot = np.abs(np.diff(chi))[spaced] / gaps[spaced]
            chi_ok = chi_ok and bool(
                np.all(np.abs(chi) <= 1.0 + 1e-12)
                and np.all(chi * vlam >= -1e-12)
                and np.all(chi[off_hood] == np.sign(vlam[off_hood]))
                and np.all(quot <= (1.0 + 1e-8) / delta + 1e-12))

        # (d) certificate chain on 50 random vectors at the minimizing level
        cert_ok = True
        for j in range(50):
            g = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
            rep = resolvent_certificate(p, nu, k, lam_star, delta, p.m, g, grid=grid)
            cert_ok = cert_ok and rep.all_hold
        ok = identities_ok and chi_ok and cert_ok
        passed = passed and ok
        details[p.name] = {"worst_accretivity": worst_acc, "worst_re": worst_re,
                           "worst_im": worst_im, "chi_ok": chi_ok, "cert_ok": cert_ok}

    # (c) sup-interpolation ratio on 1e3 random smooth bumps
    grid = Grid1D(-10.0, 10.0, 2001)
    y = grid.nodes()
    bumps = _random_smooth_bumps(rng, y, 1000)
    worst_ratio = 0.0
    for j in range(bumps.shape[1]):
        worst_ratio = max(worst_ratio, interpolation_inequality_check(bumps[:, j], grid))
    interp_ok = worst_ratio <= 1.0 + 10.0 * grid.h
    passed = passed and interp_ok
    details["interpolation"] = {"worst_ratio": worst_ratio, "bound": 1.0 + 10.0 * grid.h}
    return CriterionResult(9, "structural-identities", passed, details, time.time() - t0)


def criterion_10(seed: int = 0, workers: int | None = None) -> CriterionResult:
    """Separable two-factor profile: additivity and the product of norms."""
    t0 = time.time()
    factors = [couette(DomainSpec.interval(-1.0, 1.0)), poiseuille()]
    result = tensor_rate(factors, 1e-2, 1.0, TensorConfig(seed=seed))
    expected = rate_target(1e-2, 1.0, 1) + rate_target(1e-2, 1.0, 2)
    additive = result.sum_rate == expected
    rel_err = result.product_check.rel_err
    passed = additive and rel_err <= 0.05
    details = {"sum_rate": result.sum_rate, "expected": expected,
               "additivity_exact": additive, "product_rel_err": rel_err, "tol": 0.05}
    return CriterionResult(10, "tensorization", passed, details, time.time() - t0)


ALL_CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(seed: int = 0, workers: int | None = None, select=None,
            echo=print) -> list[CriterionResult]:
    results = []
    for i, crit in enumerate(ALL_CRITERIA, start=1):
        if select is not None and i not in select:
            continue
        res = crit(seed=seed, workers=workers)
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
