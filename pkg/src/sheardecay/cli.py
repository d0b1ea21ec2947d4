"""Command-line dispatch: configuration in, CSV/JSON artifacts out.

Exit codes: 0 all checks passed, 1 configuration error, 2 a verification
criterion failed, 3 numerical non-convergence.  Every failure also leaves a
machine-readable diagnostic JSON in the output directory.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import verify
from .config import FORMATS, RunConfig, apply_overrides, load_config
from .errors import ConfigError, NoConvergenceError, ShearDecayError
from .levelset import measure_sweep
from .operators import GridPolicy
from .profiles import check_infinity_nondegeneracy, check_nondegeneracy, taylor_couette
from .reporting import emit_table, write_json
from .resolvent import pseudospectral_abscissa
from .semigroup import check_wei_bound, operator_norm_decay
from .sweep import (
    Regime,
    SweepConfig,
    TensorConfig,
    counterexample_scan,
    fit_scaling,
    psi_sweep,
    tensor_rate,
)
from . import config as config_mod

COMMANDS = ("profile-check", "levelset-measure", "resolvent-psi", "semigroup-decay",
            "sweep-scaling", "tensor-check", "counterexample", "verify-all")

DEFAULT_PROBE_RADII = (8.0, 16.0, 32.0)


def _policy(cfg: RunConfig) -> GridPolicy:
    if cfg.window is not None:
        return replace(cfg.grid, window=cfg.window)
    return cfg.grid


def _out(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def cmd_profile_check(cfg: RunConfig) -> int:
    p = cfg.built_profile()
    pol = _policy(cfg)
    if pol.window is not None:
        lo, hi = pol.window
    else:
        lo = p.domain.a if math.isfinite(p.domain.a) else -pol.margin_factor
        hi = p.domain.b if math.isfinite(p.domain.b) else pol.margin_factor
    grid = np.linspace(lo, hi, 1001)
    nd = check_nondegeneracy(p, grid, m=cfg.m)
    inf_rep = check_infinity_nondegeneracy(p, DEFAULT_PROBE_RADII)
    payload = {
        "profile": p.name,
        "nondegeneracy": {"min_sum": nd.min_sum, "witness_y": nd.witness_y,
                          "pass": nd.passed},
        "infinity": {"liminf_estimate": inf_rep.liminf_estimate,
                     "trend": inf_rep.trend.value, "pass": inf_rep.passed},
    }
    write_json(_out(cfg, "profile_check.json"), payload)
    if not nd.passed or not inf_rep.passed:
        reasons = []
        if not nd.passed:
            reasons.append("pointwise non-degeneracy failed")
        if not inf_rep.passed:
            reasons.append("infinity non-degeneracy failed")
        _diagnostic(cfg, "profile-check", "; ".join(reasons))
        return 2
    return 0


def cmd_levelset_measure(cfg: RunConfig) -> int:
    p = cfg.built_profile()
    m = cfg.m if cfg.m is not None else p.m
    if cfg.window is not None:
        window = cfg.window
    elif p.domain.is_bounded:
        window = (p.domain.a, p.domain.b)
    else:
        raise ConfigError("levelset-measure needs a window for unbounded domains")
    cfg.require("delta_grid")
    if cfg.lambda_grid:
        lams = list(cfg.lambda_grid)
    else:
        vv = p.deriv(np.linspace(window[0], window[1], 4001), 0)
        lams = np.linspace(float(vv.min()) - 0.5, float(vv.max()) + 0.5, 61).tolist()
    sweep = measure_sweep(p, lams, cfg.delta_grid, m, window)
    header = ["lambda", "delta", "m", "measure_E", "measure_Ecal", "ratio", "saturated"]
    rows = [(r.lam, r.delta, r.m, r.measure_E, r.measure_Ecal, r.ratio, r.saturated)
            for r in sweep.rows]
    emit_table(_out(cfg, "levelset_measure"), header, rows, cfg.format)
    write_json(_out(cfg, "levelset_summary.json"),
               {"profile": p.name, "m": m, "sup_ratio": sweep.sup_ratio,
                "rows": len(rows)})
    return 0


def cmd_resolvent_psi(cfg: RunConfig) -> int:
    p = cfg.built_profile()
    cfg.require("nu", "k")
    est = pseudospectral_abscissa(p, cfg.nu, cfg.k,
                                  search=cfg.solver.to_psi_search(cfg.seed),
                                  policy=_policy(cfg))
    emit_table(_out(cfg, "resolvent_scan"), ["lambda", "sigma_min"],
               list(est.scan), cfg.format)
    write_json(_out(cfg, "psi.json"), est.to_json_dict())
    return 0


def cmd_semigroup_decay(cfg: RunConfig) -> int:
    p = cfg.built_profile()
    cfg.require("nu", "k")
    sg = replace(cfg.semigroup, seed=cfg.seed)
    series = operator_norm_decay(p, cfg.nu, cfg.k, config=sg, policy=_policy(cfg))
    est = pseudospectral_abscissa(p, cfg.nu, cfg.k,
                                  search=cfg.solver.to_psi_search(cfg.seed),
                                  policy=_policy(cfg))
    wei = check_wei_bound(series, est)
    rows = list(zip(series.times.tolist(), series.norm_bounds.tolist(),
                    [series.method.value] * len(series.times)))
    emit_table(_out(cfg, "decay_series"), ["t", "norm_bound", "method"], rows, cfg.format)
    payload = series.to_json_dict()
    payload.update({"psi": est.psi, "wei_bound_holds": wei.holds,
                    "wei_worst_slack": wei.worst_slack})
    write_json(_out(cfg, "decay_summary.json"), payload)
    return 0 if wei.holds else 2


def cmd_sweep_scaling(cfg: RunConfig) -> int:
    p = cfg.built_profile()
    cfg.require("nu_list", "k_list")
    sweep_cfg = SweepConfig(search=cfg.solver.to_psi_search(cfg.seed),
                            policy=_policy(cfg), workers=cfg.workers)
    table = psi_sweep(p, cfg.nu_list, cfg.k_list, sweep_cfg)
    header = ["nu", "k", "psi", "semigroup_rate", "regime", "grid_converged"]
    rows = [(r.nu, r.k, r.psi, r.semigroup_rate, r.regime.value, r.grid_converged)
            for r in table.rows]
    emit_table(_out(cfg, "rate_table"), header, rows, cfg.format)
    fits = {}
    for regime in Regime:
        try:
            fit = fit_scaling(table, regime)
            fits[regime.value] = {"exponent_nu": fit.exponent_nu,
                                  "exponent_k": fit.exponent_k,
                                  "prefactor": fit.prefactor,
                                  "r_squared": fit.r_squared,
                                  "rows": fit.n_rows}
        except ShearDecayError:
            continue
    if fits:
        write_json(_out(cfg, "scaling_fit.json"), fits)
    return 0


def cmd_tensor_check(cfg: RunConfig) -> int:
    if not cfg.factors:
        raise ConfigError("tensor-check needs a 'factors' list of profile specs")
    cfg.require("nu", "k")
    factors = [config_mod.build_profile(dict(spec)) for spec in cfg.factors]
    result = tensor_rate(factors, cfg.nu, cfg.k, TensorConfig(seed=cfg.seed))
    payload = {"sum_rate": result.sum_rate,
               "factor_rates": list(result.factor_rates)}
    if result.product_check is not None:
        payload["product_rel_err"] = result.product_check.rel_err
        rows = list(zip(result.product_check.times.tolist(),
                        result.product_check.norms_2d.tolist(),
                        result.product_check.norms_product.tolist()))
        emit_table(_out(cfg, "tensor_norms"), ["t", "norm_2d", "norm_product"],
                   rows, cfg.format)
    write_json(_out(cfg, "tensor_check.json"), payload)
    return 0


def cmd_counterexample(cfg: RunConfig) -> int:
    p = cfg.built_profile() if cfg.profile is not None else taylor_couette()
    cfg.require("nu", "k", "L_list")
    scan = counterexample_scan(p, cfg.nu, cfg.k, cfg.L_list,
                               search=cfg.solver.to_psi_search(cfg.seed, doubling_check=False),
                               policy=cfg.grid)
    emit_table(_out(cfg, "counterexample"), ["L", "psi"], list(scan.rows), cfg.format)
    return 0


def cmd_verify_all(cfg: RunConfig) -> int:
    results = verify.run_all(seed=cfg.seed, workers=cfg.workers)
    payload = {f"{r.index:02d}_{r.key}": {"passed": r.passed, "details": r.details}
               for r in results}
    write_json(_out(cfg, "verify_summary.json"), payload)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    if failed:
        _diagnostic(cfg, "verify-all",
                    "failed criteria: " + ", ".join(r.key for r in failed))
        return 2
    return 0


_HANDLERS = {
    "profile-check": cmd_profile_check,
    "levelset-measure": cmd_levelset_measure,
    "resolvent-psi": cmd_resolvent_psi,
    "semigroup-decay": cmd_semigroup_decay,
    "sweep-scaling": cmd_sweep_scaling,
    "tensor-check": cmd_tensor_check,
    "counterexample": cmd_counterexample,
    "verify-all": cmd_verify_all,
}


def _diagnostic(cfg: RunConfig, command: str, message: str, error_type: str = "VerificationFailed"):
    try:
        write_json(os.path.join(cfg.output_dir, "diagnostic.json"),
                   {"command": command, "status": "error",
                    "error": {"type": error_type, "message": message}})
    except ShearDecayError:
        pass
    print(f"{command}: {message}", file=sys.stderr)


def run_command(name: str, cfg: RunConfig) -> int:
    """Dispatch one verification workflow; returns the process exit code."""
    if name not in _HANDLERS:
        raise ConfigError(f"unknown command {name!r}; choose from {COMMANDS}")
    try:
        return _HANDLERS[name](cfg)
    except ConfigError:
        raise
    except NoConvergenceError as exc:
        _diagnostic(cfg, name, str(exc), error_type="NoConvergence")
        return 3
    except ShearDecayError as exc:
        _diagnostic(cfg, name, str(exc), error_type=type(exc).__name__)
        return 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sheardecay",
        description="Verification workflows for shear-mode decay rates.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to the JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--workers", type=int, help="worker pool size for sweeps")
    parser.add_argument("--seed", type=int, help="RNG seed (PCG64) for random ensembles")
    parser.add_argument("--format", choices=FORMATS, dest="fmt",
                        help="table format (default csv)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, out=args.out, workers=args.workers,
                              seed=args.seed, fmt=args.fmt)
        return run_command(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
