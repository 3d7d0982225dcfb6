"""Pick the ridge strength with leave-one-client-out validation, server-side.

The server already holds every client's statistics, so holding one client
out is a subtraction, not a retraining round. The whole sweep costs one
scalar upload per (client, sigma) cell on top of the statistics the
protocol collected anyway.
"""

import numpy as np

from fedridge import SynthSpec, federated_locov, generate, ridge_solve, merge_stats, compute_local_stats, mean_squared_error

GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)

spec = SynthSpec(clients=8, samples_per_client=8, dim=20, gamma=0.2,
                 noise_std=0.5, seed=5)
clients, test_set, _ = generate(spec)

report = federated_locov(clients, GRID)
totals = report.total_loss()

print(f"{spec.clients} clients with only {spec.samples_per_client} rows each "
      f"at dim {spec.dim}: regularization has to carry the fit")
print()
print(f"{'sigma':>8} {'summed held-out MSE':>20}")
for sigma, total in zip(report.sigma_grid, totals):
    marker = "  <- selected" if sigma == report.selected_sigma else ""
    print(f"{sigma:>8g} {total:>20.5f}{marker}")

print()
print(f"sweep overhead: {report.extra_upload_floats} floats "
      f"({report.extra_upload_bytes} bytes) across the federation")

stats = merge_stats([compute_local_stats(c) for c in clients])
final = ridge_solve(stats, report.selected_sigma)
print(f"refit at selected sigma: test MSE {mean_squared_error(final, test_set):.5f}")
for sigma in (GRID[0], GRID[-1]):
    other = ridge_solve(stats, sigma)
    print(f"  vs sigma {sigma:g}: test MSE "
          f"{mean_squared_error(other, test_set):.5f}")
