"""Run configuration: a single JSON document drives every command.

The only environment override is the output directory (and the mirrored CLI
flags); everything else lives in the config so acceptance runs are
reproducible byte for byte under a fixed seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .errors import ConfigError
from .operators import GridPolicy
from .profiles import (
    DomainSpec,
    ShearProfile,
    couette,
    kolmogorov,
    monomial,
    poiseuille,
    polynomial_profile,
    tanh_profile,
    taylor_couette,
)
from .resolvent import PsiSearch
from .semigroup import NormDecayConfig

FORMATS = ("csv", "json", "gnuplot-data")


def _domain_from_spec(spec) -> DomainSpec:
    if spec is None:
        raise ConfigError("profile domain missing")
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        a = -math.inf if spec[0] is None else float(spec[0])
        b = math.inf if spec[1] is None else float(spec[1])
        if math.isinf(a) and math.isinf(b):
            return DomainSpec.full_line()
        if math.isinf(a):
            return DomainSpec.half_line_left(b)
        if math.isinf(b):
            return DomainSpec.half_line_right(a)
        return DomainSpec.interval(a, b)
    raise ConfigError(f"domain must be a [a, b] pair (null for unbounded), got {spec!r}")


def build_profile(spec: dict) -> ShearProfile:
    """Instantiate a profile from its config record (name plus parameters)."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("profile spec must be an object with a 'name' field")
    name = spec["name"]
    domain = None
    if spec.get("domain") is not None:
        domain = _domain_from_spec(spec["domain"])
    if name in ("kolmogorov", "taylor_couette", "tanh") and domain is not None:
        raise ConfigError(f"profile {name!r} has a fixed domain")
    try:
        if name == "couette":
            return couette(domain)
        if name == "poiseuille":
            return poiseuille(domain)
        if name == "kolmogorov":
            return kolmogorov()
        if name == "monomial":
            return monomial(int(spec["degree"]), domain)
        if name == "taylor_couette":
            return taylor_couette()
        if name == "tanh":
            return tanh_profile()
        if name == "poly":
            if domain is None:
                raise ConfigError("poly profile needs a bounded 'domain'")
            return polynomial_profile(
                [float(c) for c in spec["coeffs"]], domain,
                m=int(spec["m"]) if "m" in spec else None,
                name=spec.get("label", "poly"))
    except KeyError as exc:
        raise ConfigError(f"profile {name!r} missing parameter {exc}") from exc
    raise ConfigError(f"unknown profile {name!r}")


def _resolve_grid(spec, what: str) -> list[float]:
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["lo"]), float(spec["hi"]),
                               int(spec["count"])).tolist()
        except KeyError as exc:
            raise ConfigError(f"{what} range needs lo/hi/count, missing {exc}") from exc
    if isinstance(spec, (list, tuple)) and spec:
        return [float(x) for x in spec]
    raise ConfigError(f"{what} must be a nonempty list or a lo/hi/count range")


@dataclass(frozen=True)
class SolverSettings:
    coarse_points: int = 512
    refine_tol: float = 1e-5
    sigma_tol: float = 1e-11
    max_iter: int = 400

    def to_psi_search(self, seed: int, doubling_check: bool = True) -> PsiSearch:
        return PsiSearch(coarse_points=self.coarse_points, refine_tol=self.refine_tol,
                         sigma_tol=self.sigma_tol, max_iter=self.max_iter,
                         seed=seed, doubling_check=doubling_check)


@dataclass(frozen=True)
class RunConfig:
    profile: dict | None = None
    factors: tuple[dict, ...] = ()
    nu: float | None = None
    k: float | None = None
    nu_list: tuple[float, ...] = ()
    k_list: tuple[float, ...] = ()
    lambda_grid: tuple[float, ...] = ()
    delta_grid: tuple[float, ...] = ()
    L_list: tuple[float, ...] = ()
    window: tuple[float, float] | None = None
    m: int | None = None
    grid: GridPolicy = GridPolicy()
    solver: SolverSettings = SolverSettings()
    semigroup: NormDecayConfig = NormDecayConfig()
    output_dir: str = "out"
    seed: int = 20260810
    workers: int | None = None
    format: str = "csv"

    def require(self, *names: str):
        missing = []
        for nm in names:
            val = getattr(self, nm)
            if val is None or (isinstance(val, tuple) and not val):
                missing.append(nm)
        if missing:
            raise ConfigError("config missing required field(s): " + ", ".join(missing))

    def built_profile(self) -> ShearProfile:
        self.require("profile")
        return build_profile(self.profile)


_TOP_LEVEL = {
    "profile", "factors", "nu", "k", "nu_list", "k_list", "lambda_grid",
    "delta_grid", "L_list", "window", "m", "grid", "solver", "semigroup",
    "output_dir", "seed", "workers", "format",
}


def _sub(dc_type, data: dict, what: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{what} section must be an object")
    valid = {f for f in dc_type.__dataclass_fields__}
    unknown = set(data) - valid
    if unknown:
        raise ConfigError(f"unknown {what} key(s): {', '.join(sorted(unknown))}")
    coerced: dict[str, Any] = {}
    for key, val in data.items():
        if key == "window" and val is not None:
            val = (float(val[0]), float(val[1]))
        if key == "method" and isinstance(val, str):
            from .semigroup import Method
            val = Method(val)
        coerced[key] = val
    try:
        return dc_type(**coerced)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what} section: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _TOP_LEVEL
    if unknown:
        raise ConfigError("unknown config key(s): " + ", ".join(sorted(unknown)))
    kwargs: dict[str, Any] = {}
    for key in ("profile",):
        if key in data:
            kwargs[key] = data[key]
    if "factors" in data:
        kwargs["factors"] = tuple(data["factors"])
    for key in ("nu", "k"):
        if key in data and data[key] is not None:
            kwargs[key] = float(data[key])
    for key in ("nu_list", "k_list", "delta_grid", "L_list"):
        if key in data and data[key] is not None:
            kwargs[key] = tuple(float(x) for x in data[key])
    if data.get("lambda_grid") is not None:
        kwargs["lambda_grid"] = tuple(_resolve_grid(data["lambda_grid"], "lambda_grid"))
    if data.get("window") is not None:
        w = data["window"]
        kwargs["window"] = (float(w[0]), float(w[1]))
    if data.get("m") is not None:
        kwargs["m"] = int(data["m"])
    if "grid" in data:
        kwargs["grid"] = _sub(GridPolicy, data["grid"], "grid")
    if "solver" in data:
        kwargs["solver"] = _sub(SolverSettings, data["solver"], "solver")
    if "semigroup" in data:
        kwargs["semigroup"] = _sub(NormDecayConfig, data["semigroup"], "semigroup")
    for key in ("output_dir", "format"):
        if key in data:
            kwargs[key] = str(data[key])
    if "seed" in data:
        kwargs["seed"] = int(data["seed"])
    if data.get("workers") is not None:
        kwargs["workers"] = int(data["workers"])
    cfg = RunConfig(**kwargs)
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {cfg.format!r}")
    if cfg.solver.sigma_tol <= 0 or cfg.solver.refine_tol <= 0:
        raise ConfigError("solver tolerances must be positive")
    if any(not 0.0 < d < 1.0 for d in cfg.delta_grid):
        raise ConfigError("delta grid values must lie in (0, 1)")
    return cfg


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(cfg: RunConfig, out: str | None = None, workers: int | None = None,
                    seed: int | None = None, fmt: str | None = None) -> RunConfig:
    changes: dict[str, Any] = {}
    if out is not None:
        changes["output_dir"] = out
    if workers is not None:
        changes["workers"] = workers
    if seed is not None:
        changes["seed"] = seed
    if fmt is not None:
        if fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
        changes["format"] = fmt
    return replace(cfg, **changes) if changes else cfg
