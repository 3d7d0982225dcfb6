"""Shared random projection for high-dimensional federations.

All clients compress features with the same d x m Gaussian sketch R, entries
i.i.d. N(0, 1/m), built from a shared (source_dim, target_dim, seed) triple:
the matrix is bit-identical on every client without ever being transmitted.
Clients then run the ordinary one-shot protocol in m dimensions, cutting the
upload from d(d+1)/2 + d floats to m(m+1)/2 + m.

Predictions for a raw point x use the projected model as (x' R) w. The
sketch can only represent directions in the column space of R, so accuracy
degrades as m shrinks; the worst-case distortion bound sqrt(d / m) * ||w||
tracks the trend, not the constant.

``target_dim == source_dim`` bypasses projection entirely: a square R is an
invertible rotation-and-scaling that would only distort the ridge penalty's
geometry for no compression gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .rng import generator, standard_normals
from .stats import ClientDataset, RidgeModel, Provenance
from .protocol import FederationRun, run_one_shot


@dataclass(frozen=True)
class ProjectionSpec:
    """Shared description of the sketch: dims and the common seed."""

    source_dim: int
    target_dim: int
    seed: int

    def __post_init__(self):
        if self.source_dim < 1:
            raise ValueError("source_dim must be >= 1")
        if not 1 <= self.target_dim <= self.source_dim:
            raise ValueError(
                f"target_dim must be in [1, source_dim], got {self.target_dim} "
                f"with source_dim {self.source_dim}"
            )


def projection_matrix(spec: ProjectionSpec) -> np.ndarray:
    """Materialize the d x m sketch for a spec.

    The m * d standard normals come from one seeded stream and are scaled
    by 1/sqrt(m). Equal (source_dim, target_dim, seed) triples give a
    bit-identical matrix on every client; sketches with different target
    dims are independent draws, not nested.
    """
    draws = standard_normals(generator(spec.seed),
                             (spec.target_dim, spec.source_dim))
    return draws.T / math.sqrt(spec.target_dim)


def project_dataset(data: ClientDataset, spec: ProjectionSpec) -> ClientDataset:
    """Apply the shared sketch to one client's features.

    Targets and client id are untouched. The dp_normalized flag is dropped:
    a Gaussian sketch does not preserve row norms. When
    ``target_dim == source_dim`` the input is returned unchanged.
    """
    if data.dim != spec.source_dim:
        raise DimensionMismatchError(
            f"dataset dim {data.dim} does not match projection source_dim "
            f"{spec.source_dim}"
        )
    if spec.target_dim == spec.source_dim:
        return data
    return ClientDataset(
        features=data.features @ projection_matrix(spec),
        targets=data.targets,
        client_id=data.client_id,
    )


def run_projected_one_shot(clients: list[ClientDataset], sigma: float,
                           spec: ProjectionSpec,
                           participating: set[int] | frozenset[int] | None = None,
                           ) -> tuple[RidgeModel, FederationRun]:
    """One-shot protocol over sketched features.

    Returns the m-dimensional model; score raw data by projecting it with
    the same spec first (see :func:`project_dataset`). The full-width case
    ``target_dim == source_dim`` delegates to the exact protocol.
    """
    if spec.target_dim == spec.source_dim:
        return run_one_shot(clients, sigma, participating)
    projected = [project_dataset(c, spec) for c in clients]
    model, run = run_one_shot(projected, sigma, participating)
    model = RidgeModel(weights=model.weights, sigma=model.sigma,
                       provenance=Provenance.PROJECTED)
    return model, run


def back_projected_weights(model: RidgeModel, spec: ProjectionSpec) -> np.ndarray:
    """Lift an m-dimensional model back to d space as R w.

    Useful for comparing a sketched solution against the exact one in the
    original coordinates; up to float rounding, predictions from R w on raw
    features match the projected model's predictions on sketched features.
    """
    if model.weights.shape[0] != spec.target_dim:
        raise DimensionMismatchError(
            f"model dim {model.weights.shape[0]} does not match projection "
            f"target_dim {spec.target_dim}"
        )
    if spec.target_dim == spec.source_dim:
        return model.weights.copy()
    return projection_matrix(spec) @ model.weights


def projection_error_bound(target_dim: int, source_dim: int,
                           weight_norm: float) -> float:
    """Worst-case sketch distortion sqrt(d / m) * ||w||.

    A trend-level bound: halving m inflates it by sqrt(2). The constant is
    1, so it is not tight; use it to compare sketch widths, not to certify
    absolute error.
    """
    if source_dim < 1 or not 1 <= target_dim <= source_dim:
        raise ValueError("need 1 <= target_dim <= source_dim")
    if weight_norm < 0:
        raise ValueError("weight_norm must be >= 0")
    return math.sqrt(source_dim / target_dim) * weight_norm
