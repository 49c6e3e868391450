"""Tail probabilities of the largest beta-Jacobi eigenvalue.

Three routes to P(largest eigenvalue > p1*x/(p1+p2)):

- direct Monte Carlo on the tridiagonal random-matrix model,
- an importance-sampling estimator whose proposal plants the top
  eigenvalue above the threshold,
- a closed-form asymptotic approximation,

plus exact small-n oracles and a validation battery tying them together.
"""

from .approximation import RegimeReport, log_tail_approximation, regime_check
from .errors import ConfigError, JacobiTailsError, NumericalError
from .estimator import (
    CenteredMoments,
    EstimateReport,
    ProposalDraw,
    estimate_centered_moments,
    log_is_weight,
    report_from_log_value,
    run_direct_mc,
    run_is,
    sample_proposal,
    smallest_eigenvalue_lower_tail,
)
from .oracles import log_integral_exp, oracle_tail_n1, oracle_tail_n2, tail_n1_quadrature
from .params import ModelParams
from .sampling import (
    TruncExpParams,
    derive_stream,
    log_trunc_exp_density,
    sample_beta,
    sample_gamma,
    sample_trunc_exp,
)
from .special import (
    log_beta,
    log_ensemble_norm,
    log_gamma,
    log_gamma_diff,
    log_jacobi_weight,
    log_norm_ratio,
    log_norm_ratio_asymptotic,
    reg_inc_beta,
)
from .tridiag import (
    TridiagonalMatrix,
    build_jacobi_tridiagonal,
    clamp_count,
    eig_tridiagonal,
    eig_tridiagonal_bisect,
    reset_clamp_count,
    sample_jacobi_ordered,
)

__version__ = "0.1.0"

__all__ = [
    "CenteredMoments",
    "ConfigError",
    "EstimateReport",
    "JacobiTailsError",
    "ModelParams",
    "NumericalError",
    "ProposalDraw",
    "RegimeReport",
    "TridiagonalMatrix",
    "TruncExpParams",
    "build_jacobi_tridiagonal",
    "clamp_count",
    "derive_stream",
    "eig_tridiagonal",
    "eig_tridiagonal_bisect",
    "estimate_centered_moments",
    "log_beta",
    "log_ensemble_norm",
    "log_gamma",
    "log_gamma_diff",
    "log_integral_exp",
    "log_is_weight",
    "log_jacobi_weight",
    "log_norm_ratio",
    "log_norm_ratio_asymptotic",
    "log_tail_approximation",
    "log_trunc_exp_density",
    "oracle_tail_n1",
    "oracle_tail_n2",
    "reg_inc_beta",
    "regime_check",
    "report_from_log_value",
    "reset_clamp_count",
    "run_direct_mc",
    "run_is",
    "sample_beta",
    "sample_gamma",
    "sample_jacobi_ordered",
    "sample_proposal",
    "sample_trunc_exp",
    "smallest_eigenvalue_lower_tail",
    "tail_n1_quadrature",
]
