"""Federated leave-one-client-out cross-validation.

Because statistics merge additively, the model that excludes client k is
available by subtraction: (G - G_k, h - h_k). Selecting the regularizer
therefore costs no extra uploads at all; each client only reports one
validation loss per candidate sigma (K * |grid| scalars total), and every
client's data is validated against a model that never saw it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .protocol import BYTES_PER_FLOAT
from .stats import (
    ClientDataset,
    RidgeModel,
    SufficientStats,
    compute_local_stats,
    mean_squared_error,
    merge_stats,
    ridge_solve,
    subtract_stats,
)


@dataclass(frozen=True)
class CvReport:
    """Loss table and selection from one leave-one-client-out sweep.

    ``losses[i, j]`` is client i's validation MSE under the model fitted
    without client i at ``sigma_grid[j]``; clients are ordered by ascending
    client id in ``client_ids``. ``extra_upload_floats`` is the full
    protocol overhead of the sweep: one scalar per (client, sigma) cell.
    """

    sigma_grid: tuple[float, ...]
    client_ids: tuple[int, ...]
    losses: np.ndarray
    selected_sigma: float

    @property
    def extra_upload_floats(self) -> int:
        return self.losses.size

    @property
    def extra_upload_bytes(self) -> int:
        return self.extra_upload_floats * BYTES_PER_FLOAT

    def total_loss(self) -> np.ndarray:
        """Per-sigma loss summed over held-out clients."""
        return self.losses.sum(axis=0)


def leave_one_out_model(totals: SufficientStats, part: SufficientStats,
                        sigma: float) -> RidgeModel:
    """Ridge model on everyone except the client whose stats are ``part``."""
    return ridge_solve(subtract_stats(totals, part), sigma)


def federated_locov(clients: list[ClientDataset],
                    sigma_grid: list[float] | tuple[float, ...],
                    stats_by_client: list[SufficientStats] | None = None,
                    ) -> CvReport:
    """Run the leave-one-client-out sweep and pick sigma.

    The selected sigma minimizes the summed held-out MSE; exact ties break
    toward the larger sigma (more regularization at equal evidence). The
    selection is invariant to client ordering because the totals and the
    per-client sums are. ``stats_by_client``, aligned with ``clients``,
    skips recomputing statistics the protocol already collected.
    """
    if len(clients) < 2:
        raise ValueError("leave-one-client-out needs at least 2 clients")
    grid = tuple(float(s) for s in sigma_grid)
    if not grid:
        raise ValueError("sigma_grid must be nonempty")
    if any(s <= 0 for s in grid):
        raise ValueError("every sigma in the grid must be positive")
    if stats_by_client is not None and len(stats_by_client) != len(clients):
        raise ValueError("stats_by_client must align one-to-one with clients")

    if stats_by_client is None:
        paired = [(c, compute_local_stats(c)) for c in clients]
    else:
        paired = list(zip(clients, stats_by_client))
    paired.sort(key=lambda item: item[0].client_id)
    ordered = [c for c, _ in paired]
    ids = tuple(c.client_id for c in ordered)
    if len(set(ids)) != len(ids):
        raise ValueError("client ids must be unique")
    dims = {c.dim for c in ordered}
    if len(dims) != 1:
        raise DimensionMismatchError(f"clients disagree on feature dim: {sorted(dims)}")

    local = [s for _, s in paired]
    totals = merge_stats(local)
    losses = np.zeros((len(ordered), len(grid)))
    for i, (client, part) in enumerate(zip(ordered, local)):
        rest = subtract_stats(totals, part)
        for j, sigma in enumerate(grid):
            model = ridge_solve(rest, sigma)
            losses[i, j] = mean_squared_error(model, client)

    sums = losses.sum(axis=0)
    best = sums.min()
    selected = max(grid[j] for j in range(len(grid)) if sums[j] == best)
    return CvReport(sigma_grid=grid, client_ids=ids, losses=losses,
                    selected_sigma=selected)
