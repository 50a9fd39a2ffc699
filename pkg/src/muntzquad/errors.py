"""Exception types raised across the package.

Every failure a caller can act on gets its own class so that library users
(and the CLI) can branch on the failure mode instead of parsing messages.
"""

from __future__ import annotations


class MuntzQuadError(Exception):
    """Base class for all package errors."""


class SingularMatrixError(MuntzQuadError):
    """A pivot fell below the singularity threshold in a dense solve."""


class NoConvergenceError(MuntzQuadError):
    """An iterative eigensolve exhausted its iteration cap."""


class ToleranceNotMetError(MuntzQuadError):
    """Adaptive integration hit its refinement cap before converging."""


class InvalidOrderError(MuntzQuadError, ValueError):
    """A quadrature order below 1 was requested."""


class InvalidBetaError(MuntzQuadError, ValueError):
    """A power-weight exponent beta <= -1 was requested."""


class DomainError(MuntzQuadError, ValueError):
    """An argument fell outside the domain of the function."""


class PoleHitError(MuntzQuadError, ZeroDivisionError):
    """The rational kernel was evaluated exactly at one of its poles."""


class InadmissibleSequenceError(MuntzQuadError, ValueError):
    """The exponent sequence is not admissible for the given weight."""


class InadmissibleExponentError(InadmissibleSequenceError):
    """A moment exponent violates the integrability condition."""


class LengthMismatchError(MuntzQuadError, ValueError):
    """Two paired inputs have inconsistent lengths."""


class NewtonDivergedError(MuntzQuadError):
    """Newton iteration failed to converge within its budget."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ContinuationFailedError(MuntzQuadError):
    """The continuation step size shrank below its minimum.

    Carries the last successfully solved blend parameter and iterate so a
    caller can inspect how far the path was tracked.
    """

    def __init__(self, message: str, alpha: float, nodes=None, weights=None):
        super().__init__(message)
        self.alpha = alpha
        self.nodes = nodes
        self.weights = weights


class NonFiniteSampleError(MuntzQuadError):
    """An integrand returned a non-finite value at a quadrature node."""
