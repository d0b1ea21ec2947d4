import math

import numpy as np
import pytest

from conftest import dense_tridiag, rng
from sheardecay.errors import (
    EdgeNotDecayedError,
    InvalidGridError,
    LengthMismatchError,
    ZeroVectorError,
)
from sheardecay.operators import (
    Grid1D,
    GridPolicy,
    apply,
    assemble,
    inner_h,
    interpolation_inequality_check,
    norm_h,
    numerical_range_check,
    to_dense,
    truncate_domain,
)
from sheardecay.profiles import couette, kolmogorov, poiseuille, taylor_couette


def test_grid_invariants():
    g = Grid1D(-1.0, 1.0, 5)
    assert g.h == pytest.approx(0.5)
    assert np.allclose(g.nodes(), [-1, -0.5, 0, 0.5, 1])
    with pytest.raises(InvalidGridError):
        Grid1D(-1.0, 1.0, 2)
    with pytest.raises(InvalidGridError):
        Grid1D(1.0, -1.0, 10)


def test_truncate_bounded_maps_to_itself():
    g = truncate_domain(poiseuille(), 1e-3, 1.0)
    assert (g.lo, g.hi) == (-1.0, 1.0)


def test_truncate_couette_reach():
    g = truncate_domain(couette(), 1e-3, 1.0, GridPolicy(margin_factor=8))
    assert g.hi >= 8.0 and g.lo == -g.hi
    # spacing resolves a tenth of the layer width
    assert g.h <= (1e-3) ** (1 / 3) / 10 * (1 + 1e-12)


def test_truncate_window_override():
    g = truncate_domain(taylor_couette(), 1e-3, 1.0, GridPolicy(window=(1.0, 50.0)))
    assert (g.lo, g.hi) == (1.0, 50.0)


def test_assemble_heat_kernel_constant():
    grid = Grid1D(-1.0, 1.0, 101)
    op = assemble(poiseuille(), grid, 1e-2, 0.0)
    out = apply(op, np.ones(101, dtype=complex))
    assert np.max(np.abs(out)) == 0.0


def test_assemble_multiplication_part():
    grid = Grid1D(-2.0, 2.0, 81)
    op = assemble(couette(), grid, 1e-3, 1.0)
    out = apply(op, np.ones(81, dtype=complex))
    assert np.allclose(out, 1j * grid.nodes(), atol=1e-14)


def test_assemble_matches_dense_oracle():
    g = rng(3)
    grid = Grid1D(-1.0, 1.0, 200)
    op = assemble(poiseuille(), grid, 2e-3, 1.7, lam=0.4)
    dense = dense_tridiag(*op.bands())
    x = g.standard_normal(200) + 1j * g.standard_normal(200)
    assert np.allclose(apply(op, x), dense @ x, rtol=1e-14, atol=1e-14)
    assert np.allclose(to_dense(op), dense)


def test_apply_errors_and_linearity():
    grid = Grid1D(-1.0, 1.0, 64)
    op = assemble(poiseuille(), grid, 1e-3, 1.0)
    with pytest.raises(LengthMismatchError):
        apply(op, np.ones(10))
    g = rng(11)
    x = g.standard_normal(64) + 1j * g.standard_normal(64)
    y = g.standard_normal(64) + 1j * g.standard_normal(64)
    a, b = 1.3 - 0.2j, -0.7 + 2.1j
    lhs = apply(op, a * x + b * y)
    rhs = a * apply(op, x) + b * apply(op, y)
    assert np.max(np.abs(lhs - rhs)) <= 1e-14 * np.max(np.abs(lhs))


@pytest.mark.parametrize("factory,nu,k", [
    (couette, 1e-3, 1.0),
    (poiseuille, 1e-3, 1.0),
    (kolmogorov, 1e-2, 0.5),
    (taylor_couette, 1e-3, 2.0),
])
def test_accretivity_and_numerical_range(factory, nu, k):
    p = factory()
    pol = GridPolicy(window=(1.0, 30.0)) if p.name == "taylor_couette" else GridPolicy()
    grid = truncate_domain(p, nu, k, pol)
    g = rng(5)
    for lam in (0.0, 0.3):
        op = assemble(p, grid, nu, k, lam)
        G = g.standard_normal((grid.n, 100)) + 1j * g.standard_normal((grid.n, 100))
        HG = apply(op, G)
        ips = grid.h * np.sum(HG * np.conj(G), axis=0)
        nrm2 = norm_h(G, grid.h) ** 2
        assert np.all(ips.real >= -1e-12 * nrm2)
        for j in range(0, 100, 17):
            res = numerical_range_check(op, G[:, j])
            assert res.re_residual <= 1e-12
            assert res.im_residual <= 1e-12


def test_numerical_range_constant_heat():
    grid = Grid1D(0.0, 1.0, 51)
    op = assemble(couette(), grid, 1e-2, 0.0)
    res = numerical_range_check(op, np.ones(51, dtype=complex))
    assert res.re_residual == 0.0 and res.im_residual == 0.0
    with pytest.raises(ZeroVectorError):
        numerical_range_check(op, np.zeros(51))


def test_numerical_range_laplacian_eigenvector():
    # discrete Neumann Laplacian eigenvector: cos(pi*(i+1/2)/n) has known
    # Rayleigh quotient (2 - 2 cos(pi/n)) / h^2
    n, nu = 200, 3e-3
    grid = Grid1D(0.0, 1.0, n)
    op = assemble(couette(), grid, nu, 0.0)
    i = np.arange(n)
    v = np.cos(np.pi * (i + 0.5) / n).astype(complex)
    ip = inner_h(apply(op, v), v, grid.h)
    expected = nu * (2.0 - 2.0 * math.cos(math.pi / n)) / grid.h ** 2
    assert ip.real / (norm_h(v, grid.h) ** 2) == pytest.approx(expected, rel=1e-12)


def test_interpolation_gaussian():
    grid = Grid1D(-10.0, 10.0, 4001)
    y = grid.nodes()
    g = np.exp(-y ** 2 / 2).astype(complex)
    ratio = interpolation_inequality_check(g, grid)
    # closed form: peak 1, 2 ||g|| ||g'|| = sqrt(2) * sqrt(pi)
    assert ratio == pytest.approx(1.0 / (math.sqrt(2.0) * math.sqrt(math.pi)), rel=1e-3)


def test_interpolation_scale_invariance():
    vals = []
    for sigma in (0.5, 1.0, 2.0):
        grid = Grid1D(-20.0, 20.0, 8001)
        y = grid.nodes()
        vals.append(interpolation_inequality_check(np.exp(-(y / sigma) ** 2 / 2), grid))
    assert max(vals) - min(vals) < 1e-4


def test_interpolation_random_bumps_below_one():
    g = rng(17)
    grid = Grid1D(-10.0, 10.0, 2001)
    y = grid.nodes()
    bound = 1.0 + 10.0 * grid.h
    for _ in range(200):
        f = np.zeros(grid.n, dtype=complex)
        for _ in range(3):
            amp = g.standard_normal() + 1j * g.standard_normal()
            f += amp * np.exp(-(((y - g.uniform(-3, 3)) / g.uniform(0.6, 1.2)) ** 2))
        assert interpolation_inequality_check(f, grid) <= bound


def test_interpolation_rejects_edge_mass():
    grid = Grid1D(-1.0, 1.0, 101)
    with pytest.raises(EdgeNotDecayedError):
        interpolation_inequality_check(np.ones(101, dtype=complex), grid)


def test_dirichlet_flag_keeps_accretivity():
    # comparison closure: full diagonal on the edge rows, still accretive
    grid = Grid1D(-1.0, 1.0, 101)
    op = assemble(poiseuille(), grid, 1e-2, 1.0, bc="dirichlet")
    assert op.diag[0].real == op.diag[50].real
    g = rng(13)
    G = g.standard_normal((101, 50)) + 1j * g.standard_normal((101, 50))
    ips = grid.h * np.sum(apply(op, G) * np.conj(G), axis=0)
    assert np.all(ips.real >= -1e-12 * norm_h(G, grid.h) ** 2)
