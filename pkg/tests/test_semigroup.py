import numpy as np
import pytest

from conftest import rng
from sheardecay.errors import GridMismatchError, InvalidParamsError, WindowTooSmallError
from sheardecay.operators import Grid1D, assemble, inner_h, truncate_domain
from sheardecay.profiles import couette, kolmogorov, poiseuille
from sheardecay.resolvent import PsiSearch, pseudospectral_abscissa
from sheardecay.semigroup import (
    CrankNicolson,
    DecaySeries,
    Method,
    NormDecayConfig,
    check_wei_bound,
    evolve_cn,
    fit_decay_rate,
    fit_decay_rate_arrays,
    full_scalar_rate,
    operator_norm_decay,
)


def test_constant_preserved_on_heat_path():
    grid = Grid1D(0.0, 1.0, 101)
    op = assemble(couette(), grid, 1e-2, 0.0)
    trace = evolve_cn(op, np.ones(101, dtype=complex), dt=0.05, T=5.0)
    assert np.allclose(trace.norms, trace.norms[0], rtol=1e-13)


def test_heat_eigenmode_rate():
    nu, L = 2e-3, 1.0
    grid = Grid1D(0.0, L, 400)
    op = assemble(couette(), grid, nu, 0.0)
    g0 = np.cos(np.pi * grid.nodes() / L).astype(complex)
    expected = nu * (np.pi / L) ** 2
    trace = evolve_cn(op, g0, dt=0.02 / expected / 50, T=1.0 / expected)
    rate, _ = fit_decay_rate_arrays(trace.times, trace.norms,
                                    (0.0, trace.times[-1]))
    assert rate == pytest.approx(expected, rel=0.02)


def test_cn_norm_monotone_every_step():
    g = rng(31)
    for factory, nu, k in [(couette, 1e-3, 1.0), (kolmogorov, 1e-2, 2.0)]:
        p = factory()
        grid = truncate_domain(p, nu, k)
        op = assemble(p, grid, nu, k, lam=0.2)
        trace = evolve_cn(op, g.standard_normal(grid.n) + 1j * g.standard_normal(grid.n),
                          dt=1.7, T=34.0)
        assert np.all(trace.norms[1:] <= trace.norms[:-1] * (1 + 1e-12))


def test_cn_adjoint_consistency():
    p = poiseuille()
    grid = truncate_domain(p, 1e-3, 1.0)
    op = assemble(p, grid, 1e-3, 1.0)
    cn = CrankNicolson(op, dt=0.3)
    g = rng(7)
    u = g.standard_normal(grid.n) + 1j * g.standard_normal(grid.n)
    w = g.standard_normal(grid.n) + 1j * g.standard_normal(grid.n)
    lhs = inner_h(cn.step(u), w, grid.h)
    rhs = inner_h(u, cn.adjoint_step(w), grid.h)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_fit_decay_rate_synthetic():
    times = np.linspace(0.0, 10.0, 21)
    series = DecaySeries(times=times, norm_bounds=np.exp(-0.3 * times),
                         method=Method.ENSEMBLE, fitted_rate=0.0,
                         fit_window=(0.0, 10.0), residual=0.0, meta={})
    fit = fit_decay_rate(series, (0.0, 10.0))
    assert fit.rate == pytest.approx(0.3, abs=1e-12)
    assert fit.residual <= 1e-12
    scaled = DecaySeries(times=times, norm_bounds=5.0 * np.exp(-0.3 * times),
                         method=Method.ENSEMBLE, fitted_rate=0.0,
                         fit_window=(0.0, 10.0), residual=0.0, meta={})
    assert fit_decay_rate(scaled, (0.0, 10.0)).rate == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(WindowTooSmallError):
        fit_decay_rate(series, (9.0, 10.0))


def test_norm_decay_poiseuille_bridge():
    p = poiseuille()
    nu, k = 1e-3, 1.0
    est = pseudospectral_abscissa(p, nu, k, search=PsiSearch(coarse_points=129))
    series = operator_norm_decay(p, nu, k, config=NormDecayConfig(checkpoints=16,
                                                                  power_steps=8))
    assert series.times[0] == 0.0 and series.norm_bounds[0] == 1.0
    assert np.all(np.diff(series.norm_bounds) <= 1e-12)
    wei = check_wei_bound(series, est)
    assert wei.holds
    assert series.fitted_rate >= 0.98 * est.psi
    # negative control: an inflated abscissa must break the bound
    assert not check_wei_bound(series, 10.0 * est.psi).holds


def test_norm_decay_heat_path_norm_one():
    # constants are preserved, so the true norm is 1 at every checkpoint;
    # the estimates are lower bounds that must stay near it and never above
    series = operator_norm_decay(couette(), 1e-2, 0.0,
                                 config=NormDecayConfig(checkpoints=6, power_steps=4,
                                                        ensemble_size=2, T=20.0))
    assert series.norm_bounds[0] == 1.0
    assert np.all(series.norm_bounds <= 1.0 + 1e-12)
    assert np.all(series.norm_bounds >= 0.97)
    assert check_wei_bound(series, 0.0).holds


def test_ensemble_below_power_iteration():
    p = poiseuille()
    cfgs = [NormDecayConfig(checkpoints=10, power_steps=6, method=m)
            for m in (Method.ADJOINT_POWER_ITERATION, Method.ENSEMBLE)]
    power = operator_norm_decay(p, 1e-3, 1.0, config=cfgs[0])
    ens = operator_norm_decay(p, 1e-3, 1.0, config=cfgs[1])
    assert np.all(ens.norm_bounds <= power.norm_bounds * (1 + 1e-12))
    # ensemble route still sees the decay direction of the abscissa bound
    est = pseudospectral_abscissa(p, 1e-3, 1.0, search=PsiSearch(coarse_points=129))
    assert ens.fitted_rate >= 0.9 * est.psi


def test_wei_bound_grid_mismatch():
    p = poiseuille()
    series = operator_norm_decay(p, 1e-3, 1.0,
                                 config=NormDecayConfig(checkpoints=8, power_steps=4))
    other = pseudospectral_abscissa(p, 1e-2, 1.0, search=PsiSearch(coarse_points=65,
                                                                   doubling_check=False))
    with pytest.raises(GridMismatchError):
        check_wei_bound(series, other)


def test_full_scalar_rate():
    assert full_scalar_rate(1e-3, 1.0, 0.1) == pytest.approx(0.101)
    assert full_scalar_rate(123.0, 0.0, 0.25) == 0.25
    assert full_scalar_rate(1.0, 0.1, 0.01) == pytest.approx(0.02)
    with pytest.raises(InvalidParamsError):
        full_scalar_rate(1e-3, 1.0, -0.5)
