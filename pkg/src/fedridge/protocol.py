"""One-shot federation protocol and its communication accounting.

One round, three phases: every participating client uploads its packed
statistics once, the server merges them in ascending client-id order, solves
the regularized normal equations, and broadcasts the d weights back. Any
subset of clients can participate; the result is exactly the centralized
ridge solution on the union of the participating rows, so dropout changes
*which* problem is solved, never *how well* it is solved.

Float accounting per client (8 bytes per scalar):

    one-shot:   upload d * (d + 1) / 2 + d, download d
    iterative:  upload R * d,              download R * d  (R rounds)

One-shot total traffic is strictly lower exactly when R > (d + 5) / 4.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .stats import (
    ClientDataset,
    Provenance,
    RidgeModel,
    SufficientStats,
    compute_local_stats,
    merge_stats,
    packed_length,
    ridge_solve,
)

BYTES_PER_FLOAT = 8


@dataclass(frozen=True)
class StatsMessage:
    """One client's single upload: packed Gram triangle plus moment vector."""

    client_id: int
    stats: SufficientStats

    @property
    def payload(self) -> np.ndarray:
        """Wire image of the upload (gram triangle first, then moment)."""
        return np.concatenate([self.stats.gram_upper, self.stats.moment])

    @property
    def float_count(self) -> int:
        return packed_length(self.stats.dim) + self.stats.dim

    @property
    def byte_count(self) -> int:
        return BYTES_PER_FLOAT * self.float_count


@dataclass
class FederationRun:
    """Bookkeeping for one protocol execution."""

    participating: frozenset[int]
    round_count: int
    total_upload_bytes: int
    total_download_bytes: int
    wall_time_seconds: float
    privatization_events: int = 0


def _resolve_participants(clients: list[ClientDataset],
                          participating: set[int] | frozenset[int] | None) -> list[ClientDataset]:
    by_id = {client.client_id: client for client in clients}
    if len(by_id) != len(clients):
        raise ValueError("client ids must be unique")
    if participating is None:
        chosen = sorted(by_id)
    else:
        unknown = set(participating) - set(by_id)
        if unknown:
            raise ValueError(f"unknown client ids in participating set: {sorted(unknown)}")
        chosen = sorted(participating)
    if not chosen:
        raise ValueError("no participating clients: nothing to solve")
    dims = {by_id[cid].dim for cid in chosen}
    if len(dims) != 1:
        raise DimensionMismatchError(f"clients disagree on feature dim: {sorted(dims)}")
    return [by_id[cid] for cid in chosen]


def run_one_shot(clients: list[ClientDataset], sigma: float,
                 participating: set[int] | frozenset[int] | None = None,
                 ) -> tuple[RidgeModel, FederationRun]:
    """Execute the one-shot protocol over the participating subset.

    Returns the solved model and the run's accounting. The merge consumes
    messages in ascending client-id order, so reruns are bit-reproducible
    regardless of upload arrival order.
    """
    chosen = _resolve_participants(clients, participating)
    start = time.perf_counter()
    messages = [StatsMessage(client_id=c.client_id, stats=compute_local_stats(c))
                for c in chosen]
    merged = merge_stats([m.stats for m in messages])
    model = ridge_solve(merged, sigma, provenance=Provenance.EXACT)
    elapsed = time.perf_counter() - start
    dim = merged.dim
    run = FederationRun(
        participating=frozenset(c.client_id for c in chosen),
        round_count=1,
        total_upload_bytes=sum(m.byte_count for m in messages),
        total_download_bytes=len(messages) * dim * BYTES_PER_FLOAT,
        wall_time_seconds=elapsed,
    )
    return model, run


def communication_budget(dim: int, variant: str, rounds: int | None = None,
                         ) -> tuple[int, int]:
    """Per-client (upload_floats, download_floats) for a protocol variant.

    ``variant`` is ``"one_shot"`` or ``"iterative"``; the iterative variant
    needs the round count R.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if variant == "one_shot":
        if rounds not in (None, 1):
            raise ValueError("one_shot has no round count other than 1")
        return packed_length(dim) + dim, dim
    if variant == "iterative":
        if rounds is None or rounds < 1:
            raise ValueError("iterative budget needs rounds >= 1")
        return rounds * dim, rounds * dim
    raise ValueError(f"unknown variant {variant!r}")


def one_shot_total_floats(dim: int) -> int:
    """Per-client upload + download floats for the one-shot protocol."""
    up, down = communication_budget(dim, "one_shot")
    return up + down


def iterative_total_floats(dim: int, rounds: int) -> int:
    """Per-client upload + download floats for R iterative rounds."""
    up, down = communication_budget(dim, "iterative", rounds)
    return up + down


def efficiency_threshold(dim: int) -> float:
    """Round count above which one-shot total traffic is strictly lower.

    One-shot wins exactly when R > (d + 5) / 4: the quadratic upload is
    amortized once d exceeds roughly four times the affordable round count.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return (dim + 5) / 4
