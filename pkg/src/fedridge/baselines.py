"""Iterative baselines: FedAvg and FedProx on the shared ridge objective.

Each round, participating clients start from the broadcast weights, take
``local_epochs`` passes of gradient steps on their local objective

    (1 / n_k) * ||A_k w - b_k||^2 + (sigma / n) * ||w||^2

(FedProx adds mu * (w - w_global) to each step's gradient), and the server
averages the results weighted by n_k. The per-sample scaling makes the
n_k-weighted sum of local objectives equal the global ridge objective up to
the constant 1/n, so the exact ridge solution is a stationary point of the
aggregate update; with heterogeneous clients and several local steps the
iteration still drifts to a nearby but distinct fixed point, which is the
gap one-shot fusion removes.

Every round moves d floats up and d floats down per participating client,
so R rounds cost R * d each way against the one-shot's single upload.

The optional DP variant clips each client's weight delta to unit L2 norm
and adds per-round Gaussian noise at the configured (epsilon, delta) scale;
its total privacy loss over R rounds follows advanced composition (see
:func:`fedridge.privacy.iterative_privacy_loss`).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .privacy import PrivacyParams
from .protocol import BYTES_PER_FLOAT, FederationRun, _resolve_participants
from .rng import generator, standard_normals
from .stats import (
    ClientDataset,
    Provenance,
    RidgeModel,
    compute_local_stats,
    mean_squared_error,
    merge_stats,
    ridge_solve,
)

DIVERGENCE_NORM = 1e6


@dataclass(frozen=True)
class IterativeConfig:
    """Hyperparameters shared by both baselines."""

    rounds: int
    learning_rate: float = 0.01
    local_epochs: int = 5
    proximal_mu: float = 0.01
    batch_size: int | None = None
    participation: int | None = None
    dp: PrivacyParams | None = None

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.local_epochs < 1:
            raise ValueError("local_epochs must be >= 1")
        if self.proximal_mu < 0:
            raise ValueError("proximal_mu must be >= 0")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1 when given")
        if self.participation is not None and self.participation < 1:
            raise ValueError("participation must be >= 1 when given")


def _local_update(client: ClientDataset, weights: np.ndarray, sigma: float,
                  total_samples: int, config: IterativeConfig, mu: float,
                  rng: np.random.Generator | None) -> np.ndarray:
    features, targets = client.features, client.targets
    n_k = client.n_samples
    anchor = weights
    w = weights.copy()
    reg = 2.0 * sigma / total_samples
    for _ in range(config.local_epochs):
        if config.batch_size is None or config.batch_size >= n_k:
            batches = [slice(None)]
        else:
            order = rng.permutation(n_k)
            batches = [order[i:i + config.batch_size]
                       for i in range(0, n_k, config.batch_size)]
        for batch in batches:
            x, y = features[batch], targets[batch]
            grad = (2.0 / x.shape[0]) * (x.T @ (x @ w - y)) + reg * w
            if mu > 0:
                grad = grad + mu * (w - anchor)
            w -= config.learning_rate * grad
    return w


def _run_iterative(clients: list[ClientDataset], sigma: float,
                   config: IterativeConfig, seed: int, mu: float,
                   eval_set: ClientDataset | None,
                   ) -> tuple[RidgeModel, FederationRun, list[float]]:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    pool = _resolve_participants(clients, None)
    dim = pool[0].dim
    total_samples = sum(c.n_samples for c in pool)
    weights = np.zeros(dim)
    snapshots = []
    touched: set[int] = set()
    upload_floats = 0
    minibatch = config.batch_size is not None and any(
        config.batch_size < c.n_samples for c in pool)

    start = time.perf_counter()
    for round_index in range(config.rounds):
        if config.participation is not None and config.participation < len(pool):
            picks = generator(seed, round_index).choice(
                len(pool), size=config.participation, replace=False)
            active = [pool[i] for i in sorted(picks)]
        else:
            active = pool
        round_samples = sum(c.n_samples for c in active)

        new_weights = np.zeros(dim)
        for client in active:
            client_rng = None
            if minibatch or config.dp is not None:
                client_rng = generator(seed, round_index, client.client_id)
            local = _local_update(client, weights, sigma, total_samples,
                                  config, mu, client_rng)
            if config.dp is not None:
                delta = local - weights
                norm = float(np.linalg.norm(delta))
                if norm > 1.0:
                    delta = delta / norm
                delta = delta + config.dp.tau * standard_normals(client_rng, dim)
                local = weights + delta
            new_weights += (client.n_samples / round_samples) * local
            touched.add(client.client_id)

        weights = new_weights
        upload_floats += len(active) * dim
        norm = float(np.linalg.norm(weights))
        if not np.isfinite(norm) or norm > DIVERGENCE_NORM:
            raise DivergenceError(
                f"weights diverged at round {round_index} "
                f"(||w|| = {norm:.3g}); lower the learning rate",
                round_index=round_index,
            )
        snapshots.append(weights.copy())
    elapsed = time.perf_counter() - start

    trajectory: list[float] = []
    if eval_set is not None:
        trajectory = [
            mean_squared_error(RidgeModel(w, sigma, Provenance.ITERATIVE), eval_set)
            for w in snapshots
        ]
    model = RidgeModel(weights=weights, sigma=sigma, provenance=Provenance.ITERATIVE)
    run = FederationRun(
        participating=frozenset(touched),
        round_count=config.rounds,
        total_upload_bytes=upload_floats * BYTES_PER_FLOAT,
        total_download_bytes=upload_floats * BYTES_PER_FLOAT,
        wall_time_seconds=elapsed,
    )
    return model, run, trajectory


def run_fedavg(clients: list[ClientDataset], sigma: float, config: IterativeConfig,
               seed: int, eval_set: ClientDataset | None = None,
               ) -> tuple[RidgeModel, FederationRun, list[float]]:
    """FedAvg. The proximal term is ignored (mu = 0) regardless of config.

    ``eval_set`` enables the per-round test-MSE trajectory; evaluation
    happens after training so it never pollutes the wall-time measurement.
    """
    return _run_iterative(clients, sigma, config, seed, mu=0.0, eval_set=eval_set)


def run_fedprox(clients: list[ClientDataset], sigma: float, config: IterativeConfig,
                seed: int, eval_set: ClientDataset | None = None,
                ) -> tuple[RidgeModel, FederationRun, list[float]]:
    """FedProx: FedAvg plus the proximal pull mu * (w - w_global) per step.

    With ``proximal_mu = 0`` the trajectory is identical to FedAvg under the
    same seed.
    """
    return _run_iterative(clients, sigma, config, seed, mu=config.proximal_mu,
                          eval_set=eval_set)


@dataclass(frozen=True)
class GradientGapReport:
    """Evidence that first-round gradients do not determine the solution."""

    eta_star: float
    relative_gap: float
    weight_norm: float


def gradient_insufficiency_check(clients: list[ClientDataset], sigma: float,
                                 ) -> GradientGapReport:
    """Measure how far any single aggregated gradient step is from w_sigma.

    The first-round aggregate update from w = 0 is proportional to h, so the
    best any learning rate can do in one round is the projection of w_sigma
    onto the h direction: eta* = <h, w_sigma> / ||h||^2. The reported gap
    ||eta* h - w_sigma|| / ||w_sigma|| is 0 only when h and w_sigma are
    collinear (e.g. an isotropic Gram matrix); generically it is bounded
    away from 0, which is why one round of gradient averaging cannot replace
    the one-shot statistics.
    """
    pool = _resolve_participants(clients, None)
    merged = merge_stats([compute_local_stats(c) for c in pool])
    model = ridge_solve(merged, sigma)
    h = merged.moment
    h_sq = float(h @ h)
    w_norm = float(np.linalg.norm(model.weights))
    if h_sq == 0.0 or w_norm == 0.0:
        return GradientGapReport(eta_star=0.0, relative_gap=0.0, weight_norm=w_norm)
    eta_star = float(h @ model.weights) / h_sq
    gap = float(np.linalg.norm(eta_star * h - model.weights)) / w_norm
    return GradientGapReport(eta_star=eta_star, relative_gap=gap, weight_norm=w_norm)
