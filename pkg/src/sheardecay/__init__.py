"""Desk-scale verification of shear-mode decay rates.

Library layout mirrors the pipeline: profiles -> level sets -> discretized
operator -> resolvent / pseudospectral abscissa -> semigroup decay ->
parameter sweeps, with a thin CLI for reproducible artifact runs.
"""

from .errors import ShearDecayError
from .levelset import (
    LevelSetReport,
    MonotonePiece,
    cutoff_chi,
    find_monotone_pieces,
    level_set_points,
    measure_sweep,
    neighborhood_measure,
    thickened_measure,
)
from .operators import (
    Grid1D,
    GridPolicy,
    TridiagonalOperator,
    apply,
    assemble,
    interpolation_inequality_check,
    numerical_range_check,
    truncate_domain,
)
from .profiles import (
    DomainSpec,
    ShearProfile,
    check_infinity_nondegeneracy,
    check_nondegeneracy,
    couette,
    eval_profile,
    kolmogorov,
    monomial,
    poiseuille,
    polynomial_profile,
    tanh_profile,
    taylor_couette,
)
from .resolvent import (
    PsiEstimate,
    PsiSearch,
    pseudospectral_abscissa,
    resolvent_certificate,
    resolvent_profile,
    sigma_min_tridiag,
    smallest_singular_value,
)
from .semigroup import (
    DecaySeries,
    Method,
    NormDecayConfig,
    check_wei_bound,
    evolve_cn,
    fit_decay_rate,
    full_scalar_rate,
    operator_norm_decay,
)
from .sweep import (
    RateTable,
    Regime,
    ScalingFit,
    SweepConfig,
    TensorConfig,
    counterexample_scan,
    fit_scaling,
    psi_sweep,
    rate_target,
    tensor_rate,
)

__version__ = "0.1.0"
