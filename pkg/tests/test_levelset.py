import math

import numpy as np
import pytest

from conftest import indicator_measures, rng
from sheardecay.errors import DegenerateProfileError, InvalidParamsError
from sheardecay.levelset import (
    Direction,
    cutoff_chi,
    distance_to_intervals,
    find_monotone_pieces,
    level_set_points,
    measure_sweep,
    neighborhood_measure,
    thickened_measure,
)
from sheardecay.profiles import (
    DomainSpec,
    couette,
    kolmogorov,
    monomial,
    poiseuille,
    polynomial_profile,
    taylor_couette,
)


def test_monotone_pieces_kolmogorov():
    pieces = find_monotone_pieces(kolmogorov(), (0.0, 2 * np.pi))
    assert len(pieces) == 3
    assert pieces[0].direction is Direction.UP
    assert pieces[1].direction is Direction.DOWN
    assert pieces[2].direction is Direction.UP
    assert pieces[0].hi == pytest.approx(np.pi / 2, abs=1e-9)
    assert pieces[1].hi == pytest.approx(3 * np.pi / 2, abs=1e-9)


def test_monotone_pieces_simple():
    assert len(find_monotone_pieces(couette(), (-5.0, 5.0))) == 1
    pieces = find_monotone_pieces(poiseuille(), (-1.0, 1.0))
    assert [q.direction for q in pieces] == [Direction.DOWN, Direction.UP]
    assert pieces[0].hi == pytest.approx(0.0, abs=1e-9)
    # odd cubic: the derivative touches zero without a sign change
    assert len(find_monotone_pieces(monomial(3), (-1.0, 1.0))) == 1


def test_monotone_pieces_degenerate():
    flat = polynomial_profile([1.0], DomainSpec.interval(0.0, 1.0), m=1)
    with pytest.raises(DegenerateProfileError):
        find_monotone_pieces(flat, (0.0, 1.0))


def test_level_set_points():
    roots = level_set_points(kolmogorov(), 0.5, (0.0, 2 * np.pi))
    assert np.allclose(roots, [np.pi / 6, 5 * np.pi / 6], atol=1e-10)
    assert level_set_points(kolmogorov(), 2.0, (0.0, 2 * np.pi)).size == 0
    roots = level_set_points(poiseuille(), 0.25, (-1.0, 1.0))
    assert np.allclose(roots, [-0.5, 0.5], atol=1e-10)


def test_level_set_card_bounded_by_pieces():
    p = kolmogorov()
    window = (0.0, 2 * np.pi)
    pieces = find_monotone_pieces(p, window)
    for lam in np.linspace(-1.5, 1.5, 31):
        assert level_set_points(p, lam, window, pieces=pieces).size <= len(pieces)


def test_thickened_measure_examples():
    r = thickened_measure(couette(), 0.0, 0.1, 1, (-5.0, 5.0))
    assert r.measure == pytest.approx(0.2, abs=1e-10)
    assert not r.truncation_saturated
    r = thickened_measure(poiseuille(), 0.0, 0.1, 2, (-1.0, 1.0))
    assert r.measure == pytest.approx(0.2, abs=1e-10)
    r = thickened_measure(taylor_couette(), 0.0, 0.1, 2, (1.0, 1000.0))
    assert r.truncation_saturated
    assert r.intervals[0][0] == pytest.approx(10.0, abs=1e-9)
    assert r.intervals[0][1] == pytest.approx(1000.0)


def test_neighborhood_measure_examples():
    r = neighborhood_measure(couette(), 0.0, 0.1, 1, (-5.0, 5.0))
    assert r.measure == pytest.approx(0.4, abs=1e-10)
    r = neighborhood_measure(poiseuille(), 0.0, 0.1, 2, (-1.0, 1.0))
    assert r.measure == pytest.approx(0.4, abs=1e-10)
    r = neighborhood_measure(kolmogorov(), 0.0, 0.1, 1, (0.0, 2 * np.pi))
    assert r.measure == pytest.approx(4 * np.arcsin(0.1) + 0.4, abs=1e-10)


def test_delta_validation():
    with pytest.raises(InvalidParamsError):
        thickened_measure(couette(), 0.0, 1.5, 1, (-5.0, 5.0))


@pytest.mark.parametrize("case", [
    (couette, (-5.0, 5.0), 1, 0.7),
    (poiseuille, (-1.0, 1.0), 2, 0.3),
    (kolmogorov, (0.0, 2 * np.pi), 2, 0.4),
], ids=["couette", "poiseuille", "kolmogorov"])
def test_measures_match_grid_oracle(case):
    factory, window, m, lam = case
    p = factory()
    g = rng(7)
    cell = (window[1] - window[0]) / 10 ** 6
    for lam_i, delta in [(lam, 0.2), (lam, 0.05), (0.0, 0.1), (-0.2, 0.12)]:
        m_e = thickened_measure(p, lam_i, delta, m, window).measure
        m_n = neighborhood_measure(p, lam_i, delta, m, window).measure
        o_e, o_n = indicator_measures(p, lam_i, delta, m, window)
        # thickened set: two cells; neighborhood: the run-dilation oracle is
        # only good to about a cell per interval side
        assert abs(m_e - o_e) <= 2 * cell * (1 + 1e-9)
        assert abs(m_n - o_n) <= 4 * cell * (1 + 1e-9)


def test_measure_monotone_in_delta():
    p = kolmogorov()
    window = (0.0, 2 * np.pi)
    for lam in (-1.0, 0.0, 0.3, 0.9):
        deltas = [0.0125, 0.025, 0.05, 0.1, 0.2]
        thick = [thickened_measure(p, lam, d, 2, window).measure for d in deltas]
        hood = [neighborhood_measure(p, lam, d, 2, window).measure for d in deltas]
        assert all(a <= b + 1e-12 for a, b in zip(thick[:-1], thick[1:]))
        assert all(a <= b + 1e-12 for a, b in zip(hood[:-1], hood[1:]))


def test_measure_E_below_Ecal():
    p = poiseuille()
    for lam in np.linspace(-0.5, 1.5, 21):
        e = thickened_measure(p, lam, 0.07, 2, (-1.0, 1.0)).measure
        n = neighborhood_measure(p, lam, 0.07, 2, (-1.0, 1.0)).measure
        assert e <= n + 1e-12


def test_measure_sweep_couette_exact_ratio():
    sweep = measure_sweep(couette(), np.linspace(-3, 3, 61),
                          [0.2, 0.1, 0.05, 0.025], 1, (-5.0, 5.0))
    assert sweep.sup_ratio == pytest.approx(4.0, rel=1e-9)


def test_measure_sweep_saturation_flags():
    sweep = measure_sweep(taylor_couette(), [0.0, 0.5], [0.1], 2, (1.0, 100.0))
    by_lam = {r.lam: r for r in sweep.rows}
    assert by_lam[0.0].saturated           # the set runs off to the truncation
    assert not by_lam[0.5].saturated
    assert math.isfinite(sweep.sup_ratio)


def test_cutoff_chi_examples():
    p = couette()
    w = (-5.0, 5.0)
    assert cutoff_chi(p, 0.0, 0.1, 1, 0.5, w) == pytest.approx(1.0)
    assert cutoff_chi(p, 0.0, 0.1, 1, 0.15, w) == pytest.approx(0.5, abs=1e-9)
    assert cutoff_chi(p, 0.0, 0.1, 1, -0.5, w) == pytest.approx(-1.0)


def test_cutoff_chi_empty_set_is_sign():
    p = kolmogorov()
    w = (0.0, 2 * np.pi)
    ys = np.linspace(0.1, 6.0, 50)
    chi = cutoff_chi(p, 5.0, 0.1, 2, ys, w)   # level far above the range
    assert np.all(chi == np.sign(np.sin(ys) - 5.0))


def test_cutoff_chi_properties_random():
    g = rng(42)
    p = kolmogorov()
    w = (0.0, 2 * np.pi)
    for lam, delta in [(0.0, 0.1), (0.7, 0.05), (1.0, 0.2)]:
        ys = np.sort(g.uniform(w[0], w[1], 10_000))
        chi = cutoff_chi(p, lam, delta, 2, ys, w)
        vlam = np.sin(ys) - lam
        assert np.all(np.abs(chi) <= 1.0 + 1e-12)
        assert np.all(chi * vlam >= -1e-12)
        gaps = np.diff(ys)
        ok = gaps > 1e-12
        assert np.all(np.abs(np.diff(chi))[ok] / gaps[ok] <= (1 + 1e-8) / delta + 1e-12)


def test_distance_to_intervals():
    ivs = [(0.0, 1.0), (2.0, 3.0)]
    ys = np.array([-1.0, 0.5, 1.5, 2.5, 4.0])
    assert np.allclose(distance_to_intervals(ys, ivs), [1.0, 0.0, 0.5, 0.0, 1.0])
    assert np.all(np.isinf(distance_to_intervals(ys, [])))
