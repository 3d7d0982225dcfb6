"""Compare per-client traffic of the one-round protocol against iterative training.

The one-round upload is quadratic in the feature dim but paid once; the
iterative protocols pay a linear amount every round. The crossover sits at
(d + 5) / 4 rounds, so anything that trains longer than ~d/4 rounds moves
more bytes than the single statistics upload.
"""

from fedridge import (
    BYTES_PER_FLOAT,
    communication_budget,
    efficiency_threshold,
    iterative_total_floats,
    one_shot_total_floats,
)

print("per-client traffic (upload + download floats):")
print(f"{'dim':>6} {'one-round':>12} {'100 rounds':>12} {'500 rounds':>12} "
      f"{'break-even R':>14}")
for dim in (10, 50, 100, 200, 400, 1000):
    one = one_shot_total_floats(dim)
    print(f"{dim:>6} {one:>12,} {iterative_total_floats(dim, 100):>12,} "
          f"{iterative_total_floats(dim, 500):>12,} "
          f"{efficiency_threshold(dim):>14.2f}")

print()
dim, clients = 100, 20
up, down = communication_budget(dim, "one_shot")
total = clients * up * BYTES_PER_FLOAT
print(f"at dim {dim} with {clients} clients the whole federation uploads "
      f"{total:,} bytes ({total / 1e6:.3f} MB), once")
print(f"each client sends {up:,} floats up and receives {down} back")

print()
print("sanity: brute-force totals agree with the break-even predicate")
for dim in (10, 100, 1000):
    threshold = efficiency_threshold(dim)
    flips = [r for r in range(1, 1001)
             if (one_shot_total_floats(dim) < iterative_total_floats(dim, r))
             != (r > threshold)]
    print(f"  dim {dim:>4}: first 1000 round counts, {len(flips)} disagreements")
