import json

import numpy as np
import pytest

from sheardecay.cli import main, run_command
from sheardecay.config import (
    RunConfig,
    apply_overrides,
    build_profile,
    config_from_dict,
)
from sheardecay.errors import ConfigError, IoFailureError
from sheardecay.reporting import emit_table, write_csv, write_json


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"speling": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"grid": {"n_per_lehr": 3}})


def test_config_profile_registry():
    p = build_profile({"name": "monomial", "degree": 3})
    assert p.name == "monomial3" and p.m == 3
    p = build_profile({"name": "poiseuille", "domain": [None, None]})
    assert not p.domain.is_bounded
    p = build_profile({"name": "poly", "coeffs": [0, 1, 2], "domain": [-1, 1]})
    assert p.deriv(np.array([0.5]), 0)[0] == pytest.approx(0.5 + 2 * 0.25)
    with pytest.raises(ConfigError):
        build_profile({"name": "warp-drive"})
    with pytest.raises(ConfigError):
        build_profile({"name": "monomial"})     # degree missing


def test_config_lambda_range():
    cfg = config_from_dict({"lambda_grid": {"lo": 0.0, "hi": 1.0, "count": 5}})
    assert cfg.lambda_grid == (0.0, 0.25, 0.5, 0.75, 1.0)


def test_config_validates_values():
    with pytest.raises(ConfigError):
        config_from_dict({"delta_grid": [0.5, 1.5]})
    with pytest.raises(ConfigError):
        config_from_dict({"format": "xml"})
    with pytest.raises(ConfigError):
        config_from_dict({"solver": {"sigma_tol": -1.0}})


def test_cli_exit_1_on_malformed_config(tmp_path, capsys):
    # resolvent-psi without k (the spec's canonical malformed case)
    path = write_config(tmp_path, {"profile": {"name": "couette"}, "nu": 1e-3,
                                   "output_dir": str(tmp_path / "out")})
    assert main(["resolvent-psi", "--config", path]) == 1
    assert "config" in capsys.readouterr().err


def test_cli_exit_1_on_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["profile-check", "--config", str(path)]) == 1


def test_profile_check_counterexample_exit_2(tmp_path):
    out = str(tmp_path / "out")
    path = write_config(tmp_path, {"profile": {"name": "taylor_couette"},
                                   "window": [1.0, 40.0], "output_dir": out})
    assert main(["profile-check", "--config", path]) == 2
    diag = json.loads((tmp_path / "out" / "diagnostic.json").read_text())
    assert diag["status"] == "error"
    assert "infinity" in diag["error"]["message"]
    report = json.loads((tmp_path / "out" / "profile_check.json").read_text())
    assert report["infinity"]["pass"] is False


def test_profile_check_healthy_exit_0(tmp_path):
    path = write_config(tmp_path, {"profile": {"name": "couette"},
                                   "output_dir": str(tmp_path / "out")})
    assert main(["profile-check", "--config", path]) == 0


def test_levelset_measure_csv_schema_and_determinism(tmp_path):
    data = {"profile": {"name": "kolmogorov"},
            "delta_grid": [0.2, 0.1],
            "lambda_grid": {"lo": -1.2, "hi": 1.2, "count": 7},
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["levelset-measure", "--config", path]) == 0
    csv_path = tmp_path / "out" / "levelset_measure.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "lambda,delta,m,measure_E,measure_Ecal,ratio,saturated"
    assert len(lines) == 1 + 7 * 2
    first = csv_path.read_bytes()
    assert main(["levelset-measure", "--config", path]) == 0
    assert csv_path.read_bytes() == first


def test_resolvent_psi_artifacts(tmp_path):
    data = {"profile": {"name": "poiseuille"}, "nu": 1e-2, "k": 1.0,
            "solver": {"coarse_points": 33},
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["resolvent-psi", "--config", path]) == 0
    psi = json.loads((tmp_path / "out" / "psi.json").read_text())
    assert set(psi) >= {"psi", "lambda_star", "grid_converged"}
    assert psi["psi"] > 0
    scan = (tmp_path / "out" / "resolvent_scan.csv").read_text().splitlines()
    assert scan[0] == "lambda,sigma_min" and len(scan) == 34


def test_gnuplot_format(tmp_path):
    data = {"profile": {"name": "poiseuille"}, "nu": 1e-2, "k": 1.0,
            "solver": {"coarse_points": 17, "refine_tol": 1e-3},
            "format": "gnuplot-data",
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["resolvent-psi", "--config", path]) == 0
    dat = (tmp_path / "out" / "resolvent_scan.dat").read_text().splitlines()
    assert dat[0].startswith("# lambda")


def test_counterexample_command(tmp_path):
    data = {"nu": 1e-2, "k": 1.0, "L_list": [5.0, 10.0],
            "solver": {"coarse_points": 65},
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["counterexample", "--config", path]) == 0
    lines = (tmp_path / "out" / "counterexample.csv").read_text().splitlines()
    assert lines[0] == "L,psi" and len(lines) == 3


def test_sweep_scaling_schema(tmp_path):
    data = {"profile": {"name": "poiseuille"},
            "nu_list": [1e-2, 1e-3], "k_list": [1.0],
            "solver": {"coarse_points": 33},
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["sweep-scaling", "--config", path]) == 0
    lines = (tmp_path / "out" / "rate_table.csv").read_text().splitlines()
    assert lines[0] == "nu,k,psi,semigroup_rate,regime,grid_converged"
    assert len(lines) == 3


def test_cli_overrides(tmp_path):
    cfg = RunConfig()
    over = apply_overrides(cfg, out=str(tmp_path), workers=3, seed=7, fmt="json")
    assert over.output_dir == str(tmp_path)
    assert (over.workers, over.seed, over.format) == (3, 7, "json")
    with pytest.raises(ConfigError):
        apply_overrides(cfg, fmt="yaml")


def test_emit_report_errors_on_empty(tmp_path):
    with pytest.raises(IoFailureError):
        write_csv(str(tmp_path / "x.csv"), ["a"], [])
    with pytest.raises(IoFailureError):
        write_json(str(tmp_path / "x.json"), {})
    with pytest.raises(IoFailureError):
        emit_table(str(tmp_path / "x"), ["a"], [], "csv")


def test_json_roundtrip(tmp_path):
    payload = {"psi": 0.123456789012345678, "lambda_star": -1.0,
               "grid_converged": True}
    path = write_json(str(tmp_path / "psi.json"), payload)
    assert json.loads(open(path).read()) == payload


def test_run_command_unknown():
    with pytest.raises(ConfigError):
        run_command("fold-spacetime", RunConfig())


def test_verify_runner_select():
    from sheardecay import verify
    lines = []
    results = verify.run_all(seed=0, select={8}, echo=lines.append)
    assert len(results) == 1 and results[0].passed
    assert lines and "PASS" in lines[0] and "sigma-min-oracle" in lines[0]


def test_semigroup_decay_command(tmp_path):
    data = {"profile": {"name": "poiseuille"}, "nu": 1e-2, "k": 1.0,
            "solver": {"coarse_points": 33},
            "semigroup": {"checkpoints": 6, "power_steps": 3, "ensemble_size": 2},
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    assert main(["semigroup-decay", "--config", path]) == 0
    lines = (tmp_path / "out" / "decay_series.csv").read_text().splitlines()
    assert lines[0] == "t,norm_bound,method" and len(lines) == 8
    summary = json.loads((tmp_path / "out" / "decay_summary.json").read_text())
    assert summary["wei_bound_holds"] is True and "fitted_rate" in summary


def test_tensor_check_command(tmp_path):
    data = {"factors": [{"name": "couette", "domain": [-1, 1]},
                        {"name": "poiseuille"}],
            "nu": 1e-2, "k": 1.0,
            "output_dir": str(tmp_path / "out")}
    path = write_config(tmp_path, data)
    # keep the direct 2D check tiny for a smoke run
    import sheardecay.cli as cli_mod
    from sheardecay.sweep import TensorConfig
    orig = cli_mod.TensorConfig
    cli_mod.TensorConfig = lambda seed: TensorConfig(axis_n=32, checkpoints=4,
                                                     power_steps=6, seed=seed)
    try:
        assert main(["tensor-check", "--config", path]) == 0
    finally:
        cli_mod.TensorConfig = orig
    payload = json.loads((tmp_path / "out" / "tensor_check.json").read_text())
    assert payload["sum_rate"] > 0 and "product_rel_err" in payload


def test_psi_json_roundtrip(tmp_path):
    from sheardecay.profiles import poiseuille
    from sheardecay.resolvent import PsiSearch, pseudospectral_abscissa
    from sheardecay.reporting import write_json
    est = pseudospectral_abscissa(poiseuille(), 1e-2, 1.0,
                                  search=PsiSearch(coarse_points=17, refine_tol=1e-3))
    payload = est.to_json_dict()
    path = write_json(str(tmp_path / "psi.json"), payload)
    assert json.loads(open(path).read()) == payload
