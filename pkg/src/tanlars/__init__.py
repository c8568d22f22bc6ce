"""Sparse estimation for generalized linear models via least-angle paths.

The estimators run the classical LARS/LASSO path algorithm on a surrogate
response built from the full-model likelihood (``tlars``, ``tlasso1``) or
from a single least-squares solve (``tlasso2``), and an l1-regularized GLM
baseline (``l1_glm_path``) is included for comparison, together with
AIC/BIC model selection and a reproducible Monte Carlo benchmark harness.
"""

from .data import (
    DesignMatrix,
    GramMatrix,
    ResponseVector,
    gram,
    load_dataset,
    normalize_design,
    write_dataset_csv,
)
from .errors import (
    DomainError,
    NotConverged,
    NumericalBreakdown,
    ParseError,
    RankDeficient,
    Separation,
    TanlarsError,
    ZeroVarianceColumn,
)
from .families import BINOMIAL, GAUSSIAN, POISSON, GlmFamily, get_family
from .harness import (
    CaseConfig,
    CaseReport,
    TrialSummary,
    case_config,
    generalization_error,
    generate_trial,
    load_path_csv,
    path_export,
    run_case,
    run_trial,
)
from .l1 import L1Path, LambdaGrid, kkt_residual, l1_glm_path
from .lars import LarsState, SolutionPath, equiangular, lars_path, lasso_drop, step_length
from .mle import MleOptions, MleResult, ThetaTilde, fit_mle, quadratic_loglik, solve_theta_tilde
from .selection import (
    CriterionKind,
    SelectionResult,
    active_set,
    criterion_value,
    refit_mle_on_support,
    select,
    select_many,
)
from .tangent import VirtualResponse, tlars, tlasso1, tlasso2, virtual_response

__version__ = "0.1.0"

__all__ = [
    "BINOMIAL",
    "CaseConfig",
    "CaseReport",
    "CriterionKind",
    "DesignMatrix",
    "DomainError",
    "GAUSSIAN",
    "GlmFamily",
    "GramMatrix",
    "L1Path",
    "LambdaGrid",
    "LarsState",
    "MleOptions",
    "MleResult",
    "NotConverged",
    "NumericalBreakdown",
    "POISSON",
    "ParseError",
    "RankDeficient",
    "ResponseVector",
    "SelectionResult",
    "Separation",
    "SolutionPath",
    "TanlarsError",
    "ThetaTilde",
    "TrialSummary",
    "VirtualResponse",
    "ZeroVarianceColumn",
    "active_set",
    "case_config",
    "criterion_value",
    "equiangular",
    "fit_mle",
    "generalization_error",
    "generate_trial",
    "get_family",
    "gram",
    "kkt_residual",
    "l1_glm_path",
    "lars_path",
    "lasso_drop",
    "load_dataset",
    "load_path_csv",
    "normalize_design",
    "path_export",
    "quadratic_loglik",
    "refit_mle_on_support",
    "run_case",
    "run_trial",
    "select",
    "select_many",
    "solve_theta_tilde",
    "step_length",
    "tlars",
    "tlasso1",
    "tlasso2",
    "virtual_response",
    "write_dataset_csv",
]
