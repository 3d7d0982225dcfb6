"""Sufficient statistics for distributed ridge regression.

A client's contribution to the global ridge problem is fully captured by the
pair (G_k, h_k) = (A_k' A_k, A_k' b_k). These merge by plain addition across
any row partition, so a single upload per client reconstructs the exact
centralized problem:

    (sum_k G_k + sigma * I) w = sum_k h_k

Gram matrices are stored as packed upper triangles (d * (d + 1) / 2 scalars).
That is both the wire format counted in the communication budget and a
structural guarantee of exact symmetry; full matrices are materialized only
inside the solver and the spectral diagnostics.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NormalizationError, RidgeSolveError

# Relative residual certificate demanded of every solution the solver returns.
RESIDUAL_RTOL = 1e-8

# Flagged datasets may exceed the unit bounds by at most this much (float slop).
_BOUND_TOL = 1e-12


class Provenance(enum.Enum):
    """How a model's statistics were produced."""

    EXACT = "exact"
    PRIVATE = "private"
    PROJECTED = "projected"
    ITERATIVE = "iterative"


def packed_length(dim: int) -> int:
    """Number of scalars in the packed upper triangle of a dim x dim matrix."""
    return dim * (dim + 1) // 2


@functools.lru_cache(maxsize=64)
def _triangle_indices(dim: int) -> tuple[np.ndarray, np.ndarray]:
    # Generating these costs as much as a small Gram product; every client
    # packs with the same dim, so cache per dim.
    rows, cols = np.triu_indices(dim)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def pack_upper(matrix: np.ndarray) -> np.ndarray:
    """Extract the upper triangle (row-major, diagonal included)."""
    dim = matrix.shape[0]
    if matrix.shape != (dim, dim):
        raise DimensionMismatchError(f"expected a square matrix, got {matrix.shape}")
    rows, cols = _triangle_indices(dim)
    return np.ascontiguousarray(matrix[rows, cols], dtype=np.float64)


def unpack_upper(packed: np.ndarray, dim: int) -> np.ndarray:
    """Rebuild the full symmetric matrix from its packed upper triangle.

    Both triangles are filled from the same stored scalars, so the result is
    bit-identical across the diagonal by construction.
    """
    if packed.shape != (packed_length(dim),):
        raise DimensionMismatchError(
            f"packed triangle of dim {dim} needs {packed_length(dim)} scalars, "
            f"got shape {packed.shape}"
        )
    full = np.zeros((dim, dim), dtype=np.float64)
    rows, cols = _triangle_indices(dim)
    full[rows, cols] = packed
    full[cols, rows] = packed
    return full


def _as_float_array(values: np.ndarray | list, name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"{name} must be {ndim}-dimensional, got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ClientDataset:
    """One client's local rows: features (n_k x d) and targets (n_k,).

    ``dp_normalized`` asserts that every feature row has L2 norm <= 1 and
    every target lies in [-1, 1]; the constructor verifies the claim because
    privacy calibration downstream depends on it.
    """

    features: np.ndarray
    targets: np.ndarray
    client_id: int = 0
    dp_normalized: bool = False

    def __post_init__(self):
        features = _as_float_array(self.features, "features", 2)
        targets = _as_float_array(self.targets, "targets", 1)
        if features.shape[0] != targets.shape[0]:
            raise DimensionMismatchError(
                f"features have {features.shape[0]} rows but targets have "
                f"{targets.shape[0]} entries"
            )
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)
        if self.dp_normalized and features.shape[0] > 0:
            max_row_norm = float(np.max(np.linalg.norm(features, axis=1)))
            max_target = float(np.max(np.abs(targets)))
            if max_row_norm > 1.0 + _BOUND_TOL or max_target > 1.0 + _BOUND_TOL:
                raise NormalizationError(
                    "dataset flagged dp_normalized but violates the bounds: "
                    f"max row norm {max_row_norm:.6g}, max |target| {max_target:.6g}"
                )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SufficientStats:
    """Additive ridge statistics: packed Gram triangle, moment vector, counts."""

    gram_upper: np.ndarray
    moment: np.ndarray
    sample_count: int
    dim: int

    def __post_init__(self):
        gram_upper = _as_float_array(self.gram_upper, "gram_upper", 1)
        moment = _as_float_array(self.moment, "moment", 1)
        if moment.shape != (self.dim,):
            raise DimensionMismatchError(
                f"moment has shape {moment.shape}, expected ({self.dim},)"
            )
        if gram_upper.shape != (packed_length(self.dim),):
            raise DimensionMismatchError(
                f"gram_upper has shape {gram_upper.shape}, expected "
                f"({packed_length(self.dim)},) for dim {self.dim}"
            )
        if self.sample_count < 0:
            raise ValueError("sample_count must be nonnegative")
        object.__setattr__(self, "gram_upper", gram_upper)
        object.__setattr__(self, "moment", moment)

    @property
    def gram(self) -> np.ndarray:
        """Full symmetric Gram matrix (materialized on demand)."""
        return unpack_upper(self.gram_upper, self.dim)

    @classmethod
    def zeros(cls, dim: int) -> "SufficientStats":
        return cls(
            gram_upper=np.zeros(packed_length(dim)),
            moment=np.zeros(dim),
            sample_count=0,
            dim=dim,
        )


@dataclass(frozen=True)
class RidgeModel:
    """A solved ridge model: weight vector, its regularizer, and provenance."""

    weights: np.ndarray
    sigma: float
    provenance: Provenance = Provenance.EXACT

    def __post_init__(self):
        weights = _as_float_array(self.weights, "weights", 1)
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "weights", weights)

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.shape[-1] != self.weights.shape[0]:
            raise DimensionMismatchError(
                f"features have dim {features.shape[-1]} but the model has "
                f"dim {self.weights.shape[0]}"
            )
        return features @ self.weights


def compute_local_stats(data: ClientDataset) -> SufficientStats:
    """Compute (A'A, A'b) for one client.

    Pure and deterministic: the same rows give bit-identical statistics, and
    row order within the client does not change the result beyond float
    summation order inside the BLAS product.
    """
    features = data.features
    gram = features.T @ features
    moment = features.T @ data.targets
    return SufficientStats(
        gram_upper=pack_upper(gram),
        moment=moment,
        sample_count=data.n_samples,
        dim=data.dim,
    )


def merge_stats(parts: list[SufficientStats], *, dim: int | None = None) -> SufficientStats:
    """Sum statistics across clients.

    Summation is sequential in list order; protocol-level callers pass parts
    sorted by ascending client id so merged results are reproducible no
    matter how uploads arrived. An empty merge needs an explicit ``dim``.
    """
    if not parts:
        if dim is None:
            raise DimensionMismatchError("cannot merge an empty list without a dim")
        return SufficientStats.zeros(dim)
    expected = parts[0].dim
    if dim is not None and dim != expected:
        raise DimensionMismatchError(f"dim {dim} does not match parts of dim {expected}")
    gram_upper = np.zeros(packed_length(expected))
    moment = np.zeros(expected)
    count = 0
    for part in parts:
        if part.dim != expected:
            raise DimensionMismatchError(
                f"cannot merge stats of dim {part.dim} with dim {expected}"
            )
        gram_upper += part.gram_upper
        moment += part.moment
        count += part.sample_count
    return SufficientStats(gram_upper=gram_upper, moment=moment,
                           sample_count=count, dim=expected)


def subtract_stats(total: SufficientStats, part: SufficientStats) -> SufficientStats:
    """Remove one client's contribution from a merged total (leave-one-out)."""
    if total.dim != part.dim:
        raise DimensionMismatchError(
            f"cannot subtract stats of dim {part.dim} from dim {total.dim}"
        )
    if part.sample_count > total.sample_count:
        raise ValueError("part has more samples than the total it is removed from")
    return SufficientStats(
        gram_upper=total.gram_upper - part.gram_upper,
        moment=total.moment - part.moment,
        sample_count=total.sample_count - part.sample_count,
        dim=total.dim,
    )


def ridge_solve(stats: SufficientStats, sigma: float,
                provenance: Provenance = Provenance.EXACT) -> RidgeModel:
    """Solve (G + sigma * I) w = h by Cholesky factorization.

    There is deliberately no pivoting or pseudo-inverse fallback: statistics
    whose regularized Gram matrix is not positive definite (possible only for
    noised uploads) raise :class:`RidgeSolveError` carrying the smallest
    eigenvalue, so instability is observable instead of silently smoothed
    over. Every returned model satisfies the residual certificate
    ``||(G + sigma I) w - h||_2 <= 1e-8 * (||h||_2 + 1)``.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    system = stats.gram
    system[np.diag_indices(stats.dim)] += sigma
    rhs = np.asarray(stats.moment)
    try:
        factor = scipy.linalg.cho_factor(system, lower=False, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        lambda_min = float(np.linalg.eigvalsh(system)[0])
        raise RidgeSolveError(
            "regularized Gram matrix is not positive definite "
            f"(lambda_min = {lambda_min:.6g}); a larger sigma may help",
            lambda_min=lambda_min,
        ) from exc
    weights = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    residual = float(np.linalg.norm(system @ weights - rhs))
    bound = RESIDUAL_RTOL * (float(np.linalg.norm(rhs)) + 1.0)
    if not np.isfinite(residual) or residual > bound:
        lambda_min = float(np.linalg.eigvalsh(system)[0])
        raise RidgeSolveError(
            f"solution failed the residual certificate ({residual:.6g} > "
            f"{bound:.6g}, lambda_min = {lambda_min:.6g})",
            lambda_min=lambda_min,
            residual=residual,
        )
    return RidgeModel(weights=weights, sigma=sigma, provenance=provenance)


def condition_number(stats: SufficientStats, sigma: float) -> float:
    """Condition number (lambda_max(G) + sigma) / (lambda_min(G) + sigma).

    Uses a full symmetric eigendecomposition: the spectral diagnostics are
    part of the deliverable, not a hot path, so no iterative shortcut.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    eigenvalues = np.linalg.eigvalsh(stats.gram)
    return float((eigenvalues[-1] + sigma) / (eigenvalues[0] + sigma))


def coverage(stats: SufficientStats) -> float:
    """Smallest eigenvalue of the aggregated Gram matrix.

    Measures how well the participating clients jointly cover feature space;
    directions with near-zero coverage are determined only by the
    regularizer.
    """
    return float(np.linalg.eigvalsh(stats.gram)[0])


def mean_squared_error(model: RidgeModel, data: ClientDataset) -> float:
    """Mean squared prediction error of a model on a dataset."""
    if data.n_samples == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    residuals = model.predict(data.features) - data.targets
    return float(np.mean(residuals**2))
