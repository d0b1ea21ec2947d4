"""Acceptance gate: the ten verification criteria at their stated tolerances.

Each test runs one criterion through the shared verify module (the same code
path `sheardecay verify-all` uses) and prints its pass/fail line, so a plain
`pytest tests/test_acceptance.py -s` doubles as the acceptance report.
"""
import json

from sheardecay import verify

SEED = 0


def _run(criterion):
    result = criterion(seed=SEED)
    print()
    print(result.line())
    print(json.dumps(result.details, indent=2, default=str))
    assert result.passed, result.details
    return result


def test_criterion_01_enhanced_exponent_m1():
    r = _run(verify.criterion_1)
    assert abs(r.details["exponent_nu"] - 1 / 3) <= 0.03


def test_criterion_02_enhanced_exponent_m2():
    r = _run(verify.criterion_2)
    for name in ("poiseuille", "kolmogorov"):
        assert abs(r.details[name]["exponent_nu"] - 0.5) <= 0.05


def test_criterion_03_enhanced_exponent_k():
    r = _run(verify.criterion_3)
    assert abs(r.details["exponent_k"] - 2 / 3) <= 0.05


def test_criterion_04_taylor_dispersion():
    r = _run(verify.criterion_4)
    assert abs(r.details["exponent_k"] - 2.0) <= 0.1
    assert abs(r.details["exponent_nu"] + 1.0) <= 0.15


def test_criterion_05_levelset_measure_bound():
    _run(verify.criterion_5)


def test_criterion_06_counterexample():
    r = _run(verify.criterion_6)
    psis = list(r.details["psi_by_L"].values())
    assert psis[-1] <= psis[0] / 2
    assert r.details["control_ratio"] >= 0.9


def test_criterion_07_wei_bridge():
    r = _run(verify.criterion_7)
    for name, rec in r.details.items():
        assert rec["bound_holds"] and rec["rate_ok"], name


def test_criterion_08_sigma_min_oracle():
    r = _run(verify.criterion_8)
    assert r.details["worst_rel_err"] <= 1e-8


def test_criterion_09_structural_identities():
    _run(verify.criterion_9)


def test_criterion_10_tensorization():
    r = _run(verify.criterion_10)
    assert r.details["additivity_exact"]
    assert r.details["product_rel_err"] <= 0.05
