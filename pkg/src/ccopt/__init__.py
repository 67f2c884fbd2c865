"""Solvers for convex-composite problems ``min h(c(x)) + g(x)``.

Gauss-Newton subproblems with certified lower bounds, backtracking and weak
Wolfe line searches on the ``Δf`` surrogate, and a trust-region method.
"""

from .config import BacktrackConfig, SolverConfig, Stopping, SubproblemOptions, TRConfig, WolfeConfig
from .core import (
    CompositeProblem,
    InvalidIterate,
    ModelState,
    SmoothMap,
    check_jacobian_fd,
    delta_f,
    directional_derivative_estimate,
    eval_f,
    linearize,
)
from .extended import INF, ExtendedReal
from .functions import (
    BallIndicator,
    BoxIndicator,
    L1Norm,
    L2Norm,
    LInfNorm,
    MaxCoordinate,
    OuterFunction,
    Regularizer,
    ScalarIdentity,
    WeightedL1,
    Zero,
)
from .linesearch import (
    LineSearchOutcome,
    SearchStatus,
    armijo_holds,
    backtrack,
    curvature_holds,
    run_backtracking,
    run_weak_wolfe,
    wolfe_bisect,
)
from .norms import L2, LINF, NormChoice
from .problems import CatalogEntry, Dataset, load_catalog, load_csv_dataset, make_exp_residual_map
from .subproblem import (
    SubproblemResult,
    SubproblemSpec,
    SubproblemStatus,
    brute_force_subproblem,
    solve_subproblem,
    stationarity_measure,
)
from .trace import IterationTrace, TerminationReason
from .trustregion import (
    HessianModel,
    LipschitzData,
    SufficientDecreaseParams,
    cauchy_step,
    lipschitz_delta_bound,
    radius_update,
    run_trust_region,
    sufficient_decrease_holds,
    tr_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "BacktrackConfig",
    "SolverConfig",
    "Stopping",
    "SubproblemOptions",
    "TRConfig",
    "WolfeConfig",
    "CompositeProblem",
    "InvalidIterate",
    "ModelState",
    "SmoothMap",
    "check_jacobian_fd",
    "delta_f",
    "directional_derivative_estimate",
    "eval_f",
    "linearize",
    "INF",
    "ExtendedReal",
    "BallIndicator",
    "BoxIndicator",
    "L1Norm",
    "L2Norm",
    "LInfNorm",
    "MaxCoordinate",
    "OuterFunction",
    "Regularizer",
    "ScalarIdentity",
    "WeightedL1",
    "Zero",
    "LineSearchOutcome",
    "SearchStatus",
    "armijo_holds",
    "backtrack",
    "curvature_holds",
    "run_backtracking",
    "run_weak_wolfe",
    "wolfe_bisect",
    "L2",
    "LINF",
    "NormChoice",
    "CatalogEntry",
    "Dataset",
    "load_catalog",
    "load_csv_dataset",
    "make_exp_residual_map",
    "SubproblemResult",
    "SubproblemSpec",
    "SubproblemStatus",
    "brute_force_subproblem",
    "solve_subproblem",
    "stationarity_measure",
    "IterationTrace",
    "TerminationReason",
    "HessianModel",
    "LipschitzData",
    "SufficientDecreaseParams",
    "cauchy_step",
    "lipschitz_delta_bound",
    "radius_update",
    "run_trust_region",
    "sufficient_decrease_holds",
    "tr_ratio",
    "__version__",
]
