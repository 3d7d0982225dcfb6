"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class so
that benchmark code can record structured failure diagnostics instead of
string-matching messages.
"""

from __future__ import annotations


class FedRidgeError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(FedRidgeError, ValueError):
    """Shapes of features, targets, or statistics do not line up."""


class RidgeSolveError(FedRidgeError, RuntimeError):
    """The regularized normal equations could not be solved reliably.

    Possible only when the aggregated Gram matrix is not positive definite
    after adding sigma (noised statistics can be indefinite) or when the
    solution fails the residual certificate. Carries the smallest eigenvalue
    of the system matrix so callers can decide whether a larger sigma would
    rescue the run.
    """

    def __init__(self, message: str, lambda_min: float | None = None,
                 residual: float | None = None):
        super().__init__(message)
        self.lambda_min = lambda_min
        self.residual = residual


class NormalizationError(FedRidgeError, ValueError):
    """Data violates (or was never put under) the bounded-norm contract."""


class DivergenceError(FedRidgeError, RuntimeError):
    """An iterative run blew up. Carries the offending round index."""

    def __init__(self, message: str, round_index: int):
        super().__init__(message)
        self.round_index = round_index


class ConfigError(FedRidgeError, ValueError):
    """An experiment or CLI configuration is malformed."""
