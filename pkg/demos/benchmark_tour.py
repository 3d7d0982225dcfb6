"""Drive the benchmark harness from Python and read its outputs back.

The same machinery backs the CLI: a scenario config expands into a record
per (method, sweep value, trial), records serialize to CSV or JSON, and a
rerun with the same base seed reproduces every number except wall times.
"""

from fedridge import default_config, emit_results, parse_results, run_experiment, summarize

config = default_config("Heterogeneity", trials=2,
                        methods=("Centralized", "OneShot"))
print(f"scenario {config.scenario}: methods {config.methods}, "
      f"sweep {config.sweep}, {config.trials} trials")

records = run_experiment(config)
print(f"{len(records)} records")
print()
print(summarize(records))

text = emit_results(records, "csv")
print(f"CSV payload: {len(text.splitlines())} lines, header:")
print(" ", text.splitlines()[0])

round_trip = parse_results(text)
assert len(round_trip) == len(records)
mse_match = all(a.test_mse == b.test_mse for a, b in zip(records, round_trip))
print(f"parse(emit(records)) preserves every MSE: {mse_match}")

again = run_experiment(config)
stable = all(a.test_mse == b.test_mse and a.upload_bytes == b.upload_bytes
             for a, b in zip(records, again))
print(f"second run with the same seed, identical results: {stable}")
