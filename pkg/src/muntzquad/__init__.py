"""Generalized Gaussian quadrature for Muntz systems with power weights.

Builds (N+1)-point rules on (0, 1) that integrate 2N+2 prescribed power
functions ``x**lam_k`` (repeats bring in log factors) exactly against the
weight ``x**beta``, by homotopy continuation from classical Gauss-Jacobi
with a damped Newton corrector on the orthogonal-basis moment equations.
"""

__version__ = "0.1.0"

from .classical import ClassicalRule, gauss_jacobi, gauss_laguerre, gauss_legendre
from .errors import (
    ContinuationFailedError,
    DomainError,
    InadmissibleExponentError,
    InadmissibleSequenceError,
    InvalidBetaError,
    InvalidOrderError,
    LengthMismatchError,
    MuntzQuadError,
    NewtonDivergedError,
    NoConvergenceError,
    NonFiniteSampleError,
    PoleHitError,
    SingularMatrixError,
    ToleranceNotMetError,
)
from .muntz import (
    EvalConfig,
    EvalResult,
    admissible,
    eval_all,
    eval_all_weighted,
    moment_general,
    moments,
    rational_kernel,
    scaled_derivatives,
    select_theta,
)
from .numerics import adaptive_integrate, nelder_mead_min, solve_dense, sym_tridiag_eigen
from .solver import (
    ContinuationConfig,
    NewtonConfig,
    QuadratureRule,
    RuleDiagnostics,
    RuleSpec,
    apply_rule,
    assemble,
    compute_rule,
    continuation_exponents,
    newton_solve,
    transform_to_unit_weight,
)

__all__ = [
    "__version__",
    "ClassicalRule",
    "ContinuationConfig",
    "ContinuationFailedError",
    "DomainError",
    "EvalConfig",
    "EvalResult",
    "InadmissibleExponentError",
    "InadmissibleSequenceError",
    "InvalidBetaError",
    "InvalidOrderError",
    "LengthMismatchError",
    "MuntzQuadError",
    "NewtonConfig",
    "NewtonDivergedError",
    "NoConvergenceError",
    "NonFiniteSampleError",
    "PoleHitError",
    "QuadratureRule",
    "RuleDiagnostics",
    "RuleSpec",
    "SingularMatrixError",
    "ToleranceNotMetError",
    "adaptive_integrate",
    "admissible",
    "apply_rule",
    "assemble",
    "compute_rule",
    "continuation_exponents",
    "eval_all",
    "eval_all_weighted",
    "gauss_jacobi",
    "gauss_laguerre",
    "gauss_legendre",
    "moment_general",
    "moments",
    "nelder_mead_min",
    "newton_solve",
    "rational_kernel",
    "scaled_derivatives",
    "select_theta",
    "solve_dense",
    "sym_tridiag_eigen",
    "transform_to_unit_weight",
]
