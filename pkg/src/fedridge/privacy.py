"""Gaussian-mechanism privacy for one-shot statistics.

Under the bounded-data contract (every feature row with L2 norm <= 1, every
target in [-1, 1]) a single sample changes each of G = A'A and h = A'b by at
most 1 in L2 norm. Releasing both with i.i.d. Gaussian noise of scale

    tau = sqrt(2 * ln(1.25 / delta)) / epsilon

per upper-triangle entry of G and per entry of h therefore gives each client
(epsilon, delta)-differential privacy for its one and only upload. There is
no composition: the full budget is spent exactly once.

Noise is drawn from the package's seeded Box-Muller stream (gram triangle
first, then moment), so a noised upload is reproducible from (stats, params,
seed) alone and auditable by replaying the stream. Mirroring the noised
upper triangle keeps the release exactly symmetric without doubling any
entry's variance.

Noised aggregates need not be positive definite. The solver refuses
indefinite systems loudly; that failure mode is the visible cost of strong
privacy on thin data, not a bug to hide.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .errors import NormalizationError
from .protocol import BYTES_PER_FLOAT, FederationRun, StatsMessage, _resolve_participants
from .rng import generator, standard_normals
from .stats import (
    ClientDataset,
    Provenance,
    RidgeModel,
    SufficientStats,
    compute_local_stats,
    merge_stats,
    ridge_solve,
)


def noise_scale(epsilon: float, delta: float) -> float:
    """Gaussian-mechanism noise scale for unit L2 sensitivity.

    Parameters
    ----------
    epsilon : float
        Privacy budget, > 0 (math.inf is allowed and gives zero noise).
    delta : float
        Failure probability, in (0, 1).

    Returns
    -------
    float
        tau = sqrt(2 * ln(1.25 / delta)) / epsilon.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon


@dataclass(frozen=True)
class PrivacyParams:
    """An (epsilon, delta) budget and its derived noise scale."""

    epsilon: float
    delta: float
    tau: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tau", noise_scale(self.epsilon, self.delta))


@dataclass(frozen=True)
class NoisedStats(SufficientStats):
    """Sufficient statistics after Gaussian privatization.

    Keeps the seed and budget that produced it so a run record can show the
    single privatization event. The Gram part stays exactly symmetric but is
    not necessarily positive semidefinite.
    """

    noise_seed: int = 0
    privacy: PrivacyParams | None = None


def privatize_stats(stats: SufficientStats, params: PrivacyParams,
                    seed: int) -> NoisedStats:
    """Add calibrated Gaussian noise to one client's statistics.

    Draw order is fixed: the packed Gram triangle consumes the first
    d * (d + 1) / 2 variates of the seeded stream, the moment vector the next
    d. Callers are responsible for the unit-sensitivity contract; use
    :func:`compute_private_stats` to have it checked against the dataset.
    """
    triangle = stats.gram_upper.size
    draws = standard_normals(generator(seed), triangle + stats.dim)
    return NoisedStats(
        gram_upper=stats.gram_upper + params.tau * draws[:triangle],
        moment=stats.moment + params.tau * draws[triangle:],
        sample_count=stats.sample_count,
        dim=stats.dim,
        noise_seed=seed,
        privacy=params,
    )


def compute_private_stats(data: ClientDataset, params: PrivacyParams,
                          seed: int) -> NoisedStats:
    """Compute and privatize one client's statistics, enforcing the contract.

    Raises :class:`NormalizationError` unless the dataset is flagged (and
    therefore verified) dp_normalized; noise calibrated for unit sensitivity
    protects nothing otherwise.
    """
    if not data.dp_normalized:
        raise NormalizationError(
            f"client {data.client_id} is not dp_normalized; privatizing "
            "unbounded statistics would void the privacy guarantee"
        )
    return privatize_stats(compute_local_stats(data), params, seed)


def private_one_shot(clients: list[ClientDataset], sigma: float,
                     params: PrivacyParams, seed: int,
                     participating: set[int] | frozenset[int] | None = None,
                     ) -> tuple[RidgeModel, FederationRun]:
    """One-shot protocol where every upload is privatized at the client.

    Client k draws its noise from ``seed + client_id``, so a run is fully
    reproducible while clients stay independent. Raises
    :class:`fedridge.errors.RidgeSolveError` when the noised aggregate is
    indefinite; the error carries the lambda_min diagnostic.
    """
    chosen = _resolve_participants(clients, participating)
    start = time.perf_counter()
    messages = [
        StatsMessage(client_id=c.client_id,
                     stats=compute_private_stats(c, params, seed + c.client_id))
        for c in chosen
    ]
    merged = merge_stats([m.stats for m in messages])
    model = ridge_solve(merged, sigma, provenance=Provenance.PRIVATE)
    elapsed = time.perf_counter() - start
    run = FederationRun(
        participating=frozenset(c.client_id for c in chosen),
        round_count=1,
        total_upload_bytes=sum(m.byte_count for m in messages),
        total_download_bytes=len(messages) * merged.dim * BYTES_PER_FLOAT,
        wall_time_seconds=elapsed,
        privatization_events=1,
    )
    return model, run


def iterative_privacy_loss(rounds: int, epsilon_round: float,
                           delta_round: float) -> float:
    """Total epsilon after R adaptive rounds, by advanced composition.

    epsilon_total = sqrt(2 R ln(1 / delta')) * eps0 + R * eps0 * (e^eps0 - 1),
    evaluated at delta' = delta_round. Grows like sqrt(R) for small budgets,
    which is why an iterative method must either spend far more than a
    one-shot release or add far more noise per round.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not epsilon_round > 0:
        raise ValueError(f"epsilon_round must be positive, got {epsilon_round}")
    if not 0 < delta_round < 1:
        raise ValueError(f"delta_round must be in (0, 1), got {delta_round}")
    return (math.sqrt(2.0 * rounds * math.log(1.0 / delta_round)) * epsilon_round
            + rounds * epsilon_round * math.expm1(epsilon_round))
