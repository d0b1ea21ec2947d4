"""Parameter sweeps over (nu, k), scaling-exponent fits, tensorization, and
the missing-gap scan for profiles that degenerate at infinity.

The decay-rate proxy throughout is the pseudospectral abscissa: it is
deterministic and cheap, and the semigroup route is tied to it within a
constant factor that drops out of every log-log slope.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    FactorCheckFailedError,
    GridTooLargeError,
    InsufficientRowsError,
    InvalidParamsError,
)
from .operators import Grid1D, GridPolicy, assemble
from .profiles import ShearProfile, check_infinity_nondegeneracy, check_nondegeneracy
from .resolvent import PsiSearch, pseudospectral_abscissa
from .semigroup import NormDecayConfig, _norm_series, operator_norm_decay


def rate_target(nu: float, k: float, m: int) -> float:
    """Decay-rate target: nu^(m/(m+2)) |k|^(2/(m+2)) for nu <= |k|, else k^2/nu.

    The two branches agree at nu = |k| (both equal nu there).
    """
    if nu <= 0 or k == 0 or m < 1:
        raise InvalidParamsError(f"need nu > 0, k != 0, m >= 1; got ({nu}, {k}, {m})")
    if nu <= abs(k):
        return nu ** (m / (m + 2)) * abs(k) ** (2.0 / (m + 2))
    return k * k / nu


class Regime(enum.Enum):
    ENHANCED = "enhanced"
    TAYLOR = "taylor"


def classify_regime(nu: float, k: float) -> Regime:
    return Regime.ENHANCED if nu <= abs(k) else Regime.TAYLOR


@dataclass(frozen=True)
class RateRow:
    nu: float
    k: float
    psi: float
    semigroup_rate: float
    grid_converged: bool
    regime: Regime
    error: str | None = None


@dataclass(frozen=True)
class RateTable:
    rows: tuple[RateRow, ...]

    def in_regime(self, regime: Regime) -> list[RateRow]:
        return [r for r in self.rows if r.regime is regime]


@dataclass(frozen=True)
class SweepConfig:
    search: PsiSearch = PsiSearch()
    policy: GridPolicy = GridPolicy()
    with_semigroup: bool = False
    semigroup: NormDecayConfig = NormDecayConfig()
    workers: int | None = None


def psi_sweep(p: ShearProfile, nu_list, k_list,
              config: SweepConfig = SweepConfig()) -> RateTable:
    """One abscissa row per (nu, k) pair, rows in deterministic product order.

    Rows run on a bounded thread pool; per-row failures flag the row and the
    sweep continues.
    """
    pairs = [(float(nu), float(k)) for nu in nu_list for k in k_list]
    if not pairs or any(k == 0 for _, k in pairs):
        raise InvalidParamsError("need nonempty nu/k lists with k != 0")

    def one(pair):
        nu, k = pair
        try:
            est = pseudospectral_abscissa(p, nu, k, search=config.search, policy=config.policy)
            sg_rate = math.nan
            if config.with_semigroup:
                sg_rate = operator_norm_decay(p, nu, k, config=config.semigroup,
                                              policy=config.policy).fitted_rate
            return RateRow(nu=nu, k=k, psi=est.psi, semigroup_rate=sg_rate,
                           grid_converged=est.grid_converged,
                           regime=classify_regime(nu, k))
        except Exception as exc:  # recorded, not fatal
            return RateRow(nu=nu, k=k, psi=math.nan, semigroup_rate=math.nan,
                           grid_converged=False, regime=classify_regime(nu, k),
                           error=f"{type(exc).__name__}: {exc}")

    if config.workers is not None and config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(one, pairs))
    else:
        rows = [one(pair) for pair in pairs]
    return RateTable(rows=tuple(rows))


@dataclass(frozen=True)
class ScalingFit:
    exponent_nu: float
    exponent_k: float
    prefactor: float
    r_squared: float
    n_rows: int


def fit_scaling(table: RateTable, regime: Regime,
                require_converged: bool = True) -> ScalingFit:
    """Ordinary least squares of log psi on (1, log nu, log |k|).

    A column with no variation across the selected rows is dropped from the
    design matrix and its exponent reported as NaN (not identified).
    """
    rows = [r for r in table.in_regime(regime)
            if math.isfinite(r.psi) and r.psi > 0 and r.error is None
            and (r.grid_converged or not require_converged)]
    if len(rows) < 4:
        raise InsufficientRowsError(f"need >= 4 usable rows in {regime.value}, got {len(rows)}")
    lognu = np.array([math.log(r.nu) for r in rows])
    logk = np.array([math.log(abs(r.k)) for r in rows])
    logpsi = np.array([math.log(r.psi) for r in rows])
    cols = [np.ones_like(lognu)]
    use_nu = float(np.ptp(lognu)) > 1e-12
    use_k = float(np.ptp(logk)) > 1e-12
    if use_nu:
        cols.append(lognu)
    if use_k:
        cols.append(logk)
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, logpsi, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((logpsi - fitted) ** 2))
    ss_tot = float(np.sum((logpsi - logpsi.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    idx = 1
    e_nu = e_k = math.nan
    if use_nu:
        e_nu = float(coef[idx]); idx += 1
    if use_k:
        e_k = float(coef[idx])
    return ScalingFit(exponent_nu=e_nu, exponent_k=e_k,
                      prefactor=float(math.exp(coef[0])), r_squared=r2, n_rows=len(rows))


# ---------------------------------------------------------------------------
# tensorization


@dataclass(frozen=True, eq=False)
class ProductCheck:
    times: np.ndarray
    norms_2d: np.ndarray
    norms_product: np.ndarray
    rel_err: float


@dataclass(frozen=True)
class TensorRateResult:
    sum_rate: float
    factor_rates: tuple[float, ...]
    product_check: ProductCheck | None


@dataclass(frozen=True)
class TensorConfig:
    axis_n: int = 160
    max_cells: int = 200 * 200
    checkpoints: int = 10
    horizon_efolds: float = 3.0
    imag_cfl: float = 0.2
    stiff_guard: float = 4.0
    ensemble_size: int = 4
    power_steps: int = 8
    seed: int = 0
    direct_check: bool = True
    probe_radii: tuple[float, ...] = (8.0, 16.0, 32.0)
    check_grid_points: int = 1001


class _Sparse2DCN:
    """Crank-Nicolson on a Kronecker sum Hx (x) I + I (x) Hy via sparse LU."""

    def __init__(self, hx: sp.spmatrix, hy: sp.spmatrix, dt: float):
        nx, ny = hx.shape[0], hy.shape[0]
        h2 = (sp.kron(hx, sp.identity(ny, format="csc"), format="csc")
              + sp.kron(sp.identity(nx, format="csc"), hy, format="csc"))
        eye = sp.identity(nx * ny, format="csc")
        self._b = (eye - 0.5 * dt * h2).tocsc()
        self._bh = self._b.conjugate().transpose().tocsc()
        self._lu = spla.splu((eye + 0.5 * dt * h2).tocsc())

    def step(self, g):
        return self._lu.solve(np.asarray(self._b @ g))

    def adjoint_step(self, g):
        return np.asarray(self._bh @ self._lu.solve(np.asarray(g), trans="H"))


def _factor_grid(p: ShearProfile, axis_n: int) -> Grid1D:
    if not p.domain.is_bounded:
        raise GridTooLargeError("direct tensor check needs bounded factor domains")
    return Grid1D(p.domain.a, p.domain.b, axis_n)


def _check_factor(p: ShearProfile, cfg: TensorConfig):
    if p.domain.is_bounded:
        grid = np.linspace(p.domain.a, p.domain.b, cfg.check_grid_points)
    else:
        lo = p.domain.a if math.isfinite(p.domain.a) else -cfg.probe_radii[-1]
        hi = p.domain.b if math.isfinite(p.domain.b) else cfg.probe_radii[-1]
        grid = np.linspace(lo, hi, cfg.check_grid_points)
    nd = check_nondegeneracy(p, grid)
    if not nd.passed:
        raise FactorCheckFailedError(
            f"factor {p.name}: derivative sum vanishes near y={nd.witness_y:.6g}")
    inf_report = check_infinity_nondegeneracy(p, cfg.probe_radii)
    if not inf_report.passed:
        raise FactorCheckFailedError(
            f"factor {p.name}: slope does not stay away from zero at infinity "
            f"(trend {inf_report.trend.value})")


def tensor_rate(factor_profiles: list[ShearProfile], nu: float, k: float,
                config: TensorConfig = TensorConfig()) -> TensorRateResult:
    """Separable-profile decay: per-factor rate targets add.

    For two bounded factors the additivity is cross-checked by evolving the
    Kronecker-sum operator directly and comparing its operator norm with the
    product of the per-factor norms at matched checkpoints.
    """
    if not factor_profiles:
        raise InvalidParamsError("need at least one factor profile")
    for p in factor_profiles:
        _check_factor(p, config)
    rates = tuple(rate_target(nu, k, p.m) for p in factor_profiles)
    sum_rate = float(sum(rates))

    check = None
    if config.direct_check and len(factor_profiles) == 2:
        if config.axis_n * config.axis_n > config.max_cells:
            raise GridTooLargeError(
                f"{config.axis_n}^2 cells exceed the cap {config.max_cells}")
        grids = [_factor_grid(p, config.axis_n) for p in factor_profiles]
        shifts, spread = [], 0.0
        for p, g in zip(factor_profiles, grids):
            vv = p.deriv(g.nodes(), 0)
            shifts.append(0.5 * (float(vv.min()) + float(vv.max())))
            spread += float(np.max(np.abs(vv - shifts[-1])))
        dt_max = min(0.05 / sum_rate, config.imag_cfl / (abs(k) * spread))
        T = config.horizon_efolds / sum_rate
        spc = max(1, int(math.ceil((T / config.checkpoints) / dt_max)))
        dt = (T / config.checkpoints) / spc

        ops = [assemble(p, g, nu, k, lam=s)
               for p, g, s in zip(factor_profiles, grids, shifts)]
        factor_norms = []
        for i, op in enumerate(ops):
            from .semigroup import CrankNicolson
            cn = CrankNicolson(op, dt)
            power, _ = _norm_series(cn.step, cn.adjoint_step, op.n, config.checkpoints,
                                    spc, config.ensemble_size, config.power_steps,
                                    config.seed + i)
            factor_norms.append(power)

        def band_matrix(op):
            dl, d, du = op.bands()
            return sp.diags([dl, d, du], [-1, 0, 1], format="csc")

        cn2 = _Sparse2DCN(band_matrix(ops[0]), band_matrix(ops[1]), dt)
        n2 = config.axis_n * config.axis_n
        power2, _ = _norm_series(cn2.step, cn2.adjoint_step, n2, config.checkpoints,
                                 spc, config.ensemble_size, config.power_steps,
                                 config.seed + 17)
        times = np.arange(config.checkpoints + 1) * (spc * dt)
        product = factor_norms[0] * factor_norms[1]
        rel = np.abs(power2[1:] - product[1:]) / product[1:]
        check = ProductCheck(times=times, norms_2d=power2, norms_product=product,
                             rel_err=float(rel.max()))
    return TensorRateResult(sum_rate=sum_rate, factor_rates=rates, product_check=check)


# ---------------------------------------------------------------------------
# missing-gap scan


@dataclass(frozen=True)
class CounterexampleScan:
    profile_name: str
    rows: tuple[tuple[float, float], ...]    # (L, psi)

    def psis(self) -> np.ndarray:
        return np.array([psi for _, psi in self.rows])


def counterexample_scan(p: ShearProfile, nu: float, k: float, L_list,
                        search: PsiSearch = PsiSearch(doubling_check=False),
                        policy: GridPolicy = GridPolicy()) -> CounterexampleScan:
    """Abscissa per truncation length on windows (lo, L).

    The left end is the finite domain edge (1 for the decaying-slope
    profile); growing L lets any missing uniform gap show up as psi
    sinking toward 0, while a healthy profile plateaus.
    """
    Ls = [float(L) for L in L_list]
    if sorted(Ls) != Ls:
        raise InvalidParamsError("truncation lengths must be increasing")
    lo = p.domain.a if math.isfinite(p.domain.a) else 1.0
    rows = []
    for L in Ls:
        pol = replace(policy, window=(lo, L))
        est = pseudospectral_abscissa(p, nu, k, search=search, policy=pol)
        rows.append((L, est.psi))
    return CounterexampleScan(profile_name=p.name, rows=tuple(rows))
