"""Benchmark harness: scenario grids, run records, and result emission.

Seven scenarios cover the toolkit's claims at desk scale:

========================  =====================================================
Main                      defaults, every method, FedAvg at several budgets
Heterogeneity             gamma sweep; one-shot vs iterative under client skew
Communication             dim sweep; measured bytes against the closed formulas
Convergence               per-round test-MSE trajectories vs the one-shot line
Privacy                   epsilon sweep on dp-normalized data
Scalability               client-count sweep at fixed per-client rows
Projection                sketch-width sweep at high dim
========================  =====================================================

Every (method, sweep value, trial) cell becomes one :class:`RunRecord`. A
cell that fails (e.g. an indefinite private solve at a tight budget) is
recorded with its diagnostics and the sweep continues: failures are results
here, not crashes.

Determinism: a config plus ``base_seed`` fixes every record except wall
times. Trial t draws data from ``base_seed + t`` and algorithm randomness
(noise, sketches, sampling) from ``base_seed + 100000 + 1000 * t``; the
algorithm seed is deliberately shared across sweep values, so comparisons
along a sweep are paired and mean trends are not drowned by draw-to-draw
variance.

The Privacy scenario defaults to 20 trials and to a wider, lower-dimensional
federation (dim 20, 1500 rows per client) than the other scenarios. With
rows genuinely scaled to unit norm, an aggregated Gram matrix can only reach
lambda_min of about n/d, while the mechanism's aggregate noise floor grows
like 2 * tau * sqrt(K * d); at dim 100 with 500-row clients that makes every
budget below roughly epsilon = 5 indefinite. The default shape keeps the
full epsilon sweep solvable so the privacy/utility trade-off is visible,
and the tight-budget failure mode stays reproducible by config.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import IterativeConfig, run_fedavg, run_fedprox
from .datagen import SynthSpec, generate
from .errors import ConfigError, FedRidgeError, RidgeSolveError
from .privacy import PrivacyParams, private_one_shot
from .projection import ProjectionSpec, project_dataset, run_projected_one_shot
from .protocol import run_one_shot
from .stats import (
    ClientDataset,
    Provenance,
    RidgeModel,
    compute_local_stats,
    condition_number,
    coverage,
    mean_squared_error,
    ridge_solve,
)

SCENARIOS = ("Main", "Heterogeneity", "Communication", "Convergence",
             "Privacy", "Scalability", "Projection")
METHODS = ("OneShot", "FedAvg", "FedProx", "Centralized",
           "PrivateOneShot", "DpFedAvg", "ProjectedOneShot")

CSV_COLUMNS = ("scenario", "method", "sweep_value", "trial", "test_mse",
               "rounds", "upload_bytes", "download_bytes", "wall_time_s",
               "extra_json")

_ALGO_SEED_OFFSET = 100000
_ALGO_SEED_STRIDE = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one scenario's record set."""

    scenario: str
    data: SynthSpec = SynthSpec()
    methods: tuple[str, ...] = ()
    sweep: tuple[float, ...] = ()
    trials: int = 5
    base_seed: int = 0
    sigma: float = 0.01
    rounds: int = 200
    fedavg_rounds: tuple[int, ...] = (100, 200, 500)
    learning_rate: float = 0.01
    local_epochs: int = 5
    proximal_mu: float = 0.01
    batch_size: int | None = None
    delta: float = 1e-5

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(
                    f"unknown method {method!r}; expected one of {METHODS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")


@dataclass
class RunRecord:
    """One benchmark cell. ``None`` fields mean not-applicable (or failed)."""

    scenario: str
    method: str
    sweep_value: float | None
    trial: int
    test_mse: float | None
    rounds: int | None
    upload_bytes: int
    download_bytes: int
    wall_time_seconds: float
    extra: dict = field(default_factory=dict)


_SCENARIO_DEFAULTS: dict[str, dict] = {
    "Main": dict(
        methods=("Centralized", "OneShot", "FedAvg", "FedProx"),
        sweep=(), trials=5, rounds=200,
    ),
    "Heterogeneity": dict(
        methods=("Centralized", "OneShot", "FedAvg", "FedProx"),
        sweep=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0), trials=5, rounds=200,
    ),
    "Communication": dict(
        methods=("OneShot", "FedAvg"),
        sweep=(50.0, 100.0, 200.0, 400.0), trials=5, rounds=200,
    ),
    "Convergence": dict(
        methods=("OneShot", "FedAvg", "FedProx"),
        sweep=(), trials=5, rounds=300,
    ),
    "Privacy": dict(
        methods=("OneShot", "PrivateOneShot", "DpFedAvg"),
        sweep=(0.5, 1.0, 2.0, 5.0, 10.0), trials=20, rounds=100,
        data=SynthSpec(clients=20, samples_per_client=1500, dim=20,
                       dp_normalize=True),
    ),
    "Scalability": dict(
        methods=("OneShot", "FedAvg"),
        sweep=(10.0, 50.0, 200.0), trials=5, rounds=100,
        data=SynthSpec(samples_per_client=200),
    ),
    "Projection": dict(
        methods=("ProjectedOneShot",),
        sweep=(100.0, 200.0, 400.0, 800.0, 1000.0), trials=20,
        data=SynthSpec(dim=1000),
    ),
}


def default_config(scenario: str, **overrides) -> ExperimentConfig:
    """Scenario defaults, with keyword overrides applied on top."""
    if scenario not in _SCENARIO_DEFAULTS:
        raise ConfigError(
            f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    settings = dict(_SCENARIO_DEFAULTS[scenario])
    settings.update(overrides)
    return ExperimentConfig(scenario=scenario, **settings)


def _data_seed(config: ExperimentConfig, trial: int) -> int:
    return config.base_seed + trial


def _algo_seed(config: ExperimentConfig, trial: int) -> int:
    return config.base_seed + _ALGO_SEED_OFFSET + _ALGO_SEED_STRIDE * trial


def _iterative_config(config: ExperimentConfig, rounds: int,
                      participation: int | None = None,
                      dp: PrivacyParams | None = None) -> IterativeConfig:
    return IterativeConfig(
        rounds=rounds,
        learning_rate=config.learning_rate,
        local_epochs=config.local_epochs,
        proximal_mu=config.proximal_mu,
        batch_size=config.batch_size,
        participation=participation,
        dp=dp,
    )


def _pool_clients(clients: list[ClientDataset]) -> ClientDataset:
    return ClientDataset(
        features=np.concatenate([c.features for c in clients], axis=0),
        targets=np.concatenate([c.targets for c in clients], axis=0),
        client_id=0,
    )


def _centralized_record(scenario: str, sweep_value: float | None, trial: int,
                        clients: list[ClientDataset], test_set: ClientDataset,
                        sigma: float) -> RunRecord:
    start = time.perf_counter()
    pooled_stats = compute_local_stats(_pool_clients(clients))
    model = ridge_solve(pooled_stats, sigma)
    elapsed = time.perf_counter() - start
    extra = {
        "kappa": condition_number(pooled_stats, sigma),
        "lambda_min": coverage(pooled_stats),
    }
    return RunRecord(scenario=scenario, method="Centralized",
                     sweep_value=sweep_value, trial=trial,
                     test_mse=mean_squared_error(model, test_set),
                     rounds=None, upload_bytes=0, download_bytes=0,
                     wall_time_seconds=elapsed, extra=extra)


def _failure_record(scenario: str, method: str, sweep_value: float | None,
                    trial: int, error: FedRidgeError) -> RunRecord:
    extra = {"status": "failed", "error": f"{type(error).__name__}: {error}"}
    if isinstance(error, RidgeSolveError) and error.lambda_min is not None:
        extra["lambda_min"] = error.lambda_min
    return RunRecord(scenario=scenario, method=method, sweep_value=sweep_value,
                     trial=trial, test_mse=None, rounds=None, upload_bytes=0,
                     download_bytes=0, wall_time_seconds=0.0, extra=extra)


def _one_shot_record(scenario: str, sweep_value: float | None, trial: int,
                     clients, test_set, sigma) -> RunRecord:
    model, run = run_one_shot(clients, sigma)
    return RunRecord(scenario=scenario, method="OneShot",
                     sweep_value=sweep_value, trial=trial,
                     test_mse=mean_squared_error(model, test_set),
                     rounds=run.round_count,
                     upload_bytes=run.total_upload_bytes,
                     download_bytes=run.total_download_bytes,
                     wall_time_seconds=run.wall_time_seconds)


def _iterative_record(scenario: str, method: str, sweep_value: float | None,
                      trial: int, clients, test_set, sigma,
                      iter_config: IterativeConfig, seed: int,
                      keep_trajectory: bool = False) -> RunRecord:
    runner = run_fedprox if method == "FedProx" else run_fedavg
    model, run, trajectory = runner(clients, sigma, iter_config, seed,
                                    eval_set=test_set)
    extra = {"trajectory": trajectory} if keep_trajectory else {}
    return RunRecord(scenario=scenario, method=method, sweep_value=sweep_value,
                     trial=trial, test_mse=trajectory[-1],
                     rounds=run.round_count,
                     upload_bytes=run.total_upload_bytes,
                     download_bytes=run.total_download_bytes,
                     wall_time_seconds=run.wall_time_seconds, extra=extra)


def _private_record(scenario: str, epsilon: float, trial: int, clients,
                    test_set, sigma, delta: float, seed: int) -> RunRecord:
    params = PrivacyParams(epsilon=epsilon, delta=delta)
    model, run = private_one_shot(clients, sigma, params, seed)
    extra = {"privatization_events": run.privatization_events,
             "tau": params.tau}
    return RunRecord(scenario=scenario, method="PrivateOneShot",
                     sweep_value=epsilon, trial=trial,
                     test_mse=mean_squared_error(model, test_set),
                     rounds=run.round_count,
                     upload_bytes=run.total_upload_bytes,
                     download_bytes=run.total_download_bytes,
                     wall_time_seconds=run.wall_time_seconds, extra=extra)


def _projected_record(scenario: str, target_dim: int, trial: int, clients,
                      test_set, sigma, seed: int) -> RunRecord:
    spec = ProjectionSpec(source_dim=test_set.dim, target_dim=target_dim,
                          seed=seed)
    model, run = run_projected_one_shot(clients, sigma, spec)
    projected_test = project_dataset(test_set, spec)
    return RunRecord(scenario=scenario, method="ProjectedOneShot",
                     sweep_value=float(target_dim), trial=trial,
                     test_mse=mean_squared_error(model, projected_test),
                     rounds=run.round_count,
                     upload_bytes=run.total_upload_bytes,
                     download_bytes=run.total_download_bytes,
                     wall_time_seconds=run.wall_time_seconds)


def _guarded(records: list[RunRecord], scenario: str, method: str,
             sweep_value: float | None, trial: int, build) -> None:
    """Run one cell; failures become records instead of aborting the sweep."""
    try:
        records.append(build())
    except FedRidgeError as error:
        records.append(_failure_record(scenario, method, sweep_value, trial, error))


def _run_main(config: ExperimentConfig) -> list[RunRecord]:
    records: list[RunRecord] = []
    for trial in range(config.trials):
        data_spec = replace(config.data, seed=_data_seed(config, trial))
        clients, test_set, _ = generate(data_spec)
        seed = _algo_seed(config, trial)
        for method in config.methods:
            if method == "Centralized":
                _guarded(records, config.scenario, method, None, trial,
                         lambda: _centralized_record(config.scenario, None, trial,
                                                     clients, test_set, config.sigma))
            elif method == "OneShot":
                _guarded(records, config.scenario, method, None, trial,
                         lambda: _one_shot_record(config.scenario, None, trial,
                                                  clients, test_set, config.sigma))
            elif method == "FedAvg":
                for rounds in config.fedavg_rounds:
                    it = _iterative_config(config, rounds)
                    _guarded(records, config.scenario, method, float(rounds), trial,
                             lambda it=it, r=rounds: _iterative_record(
                                 config.scenario, "FedAvg", float(r), trial,
                                 clients, test_set, config.sigma, it, seed))
            elif method == "FedProx":
                it = _iterative_config(config, config.rounds)
                _guarded(records, config.scenario, method, float(config.rounds), trial,
                         lambda it=it: _iterative_record(
                             config.scenario, "FedProx", float(config.rounds), trial,
                             clients, test_set, config.sigma, it, seed))
    return records


def _run_sweep_over_data(config: ExperimentConfig, rebuild_spec) -> list[RunRecord]:
    """Scenarios whose sweep value changes the dataset itself."""
    records: list[RunRecord] = []
    for trial in range(config.trials):
        for value in config.sweep:
            data_spec = rebuild_spec(config, value, _data_seed(config, trial))
            clients, test_set, _ = generate(data_spec)
            seed = _algo_seed(config, trial)
            participation = None
            if config.scenario == "Scalability" and data_spec.clients > 50:
                participation = 20
            for method in config.methods:
                if method == "Centralized":
                    _guarded(records, config.scenario, method, value, trial,
                             lambda v=value: _centralized_record(
                                 config.scenario, v, trial, clients, test_set,
                                 config.sigma))
                elif method == "OneShot":
                    _guarded(records, config.scenario, method, value, trial,
                             lambda v=value: _one_shot_record(
                                 config.scenario, v, trial, clients, test_set,
                                 config.sigma))
                elif method in ("FedAvg", "FedProx"):
                    it = _iterative_config(config, config.rounds, participation)
                    _guarded(records, config.scenario, method, value, trial,
                             lambda it=it, m=method, v=value: _iterative_record(
                                 config.scenario, m, v, trial, clients, test_set,
                                 config.sigma, it, seed))
                else:
                    raise ConfigError(
                        f"method {method!r} is not available in scenario "
                        f"{config.scenario!r}")
    return records


def _run_convergence(config: ExperimentConfig) -> list[RunRecord]:
    records: list[RunRecord] = []
    for trial in range(config.trials):
        data_spec = replace(config.data, seed=_data_seed(config, trial))
        clients, test_set, _ = generate(data_spec)
        seed = _algo_seed(config, trial)
        for method in config.methods:
            if method == "OneShot":
                def build():
                    record = _one_shot_record(config.scenario, None, trial,
                                              clients, test_set, config.sigma)
                    record.extra = {"trajectory": [record.test_mse]}
                    return record
                _guarded(records, config.scenario, method, None, trial, build)
            elif method in ("FedAvg", "FedProx"):
                it = _iterative_config(config, config.rounds)
                _guarded(records, config.scenario, method, float(config.rounds),
                         trial,
                         lambda it=it, m=method: _iterative_record(
                             config.scenario, m, float(config.rounds), trial,
                             clients, test_set, config.sigma, it, seed,
                             keep_trajectory=True))
            else:
                raise ConfigError(
                    f"method {method!r} is not available in scenario "
                    f"{config.scenario!r}")
    return records


def _run_privacy(config: ExperimentConfig) -> list[RunRecord]:
    if not config.data.dp_normalize:
        raise ConfigError("the Privacy scenario requires dp_normalize = true")
    records: list[RunRecord] = []
    for trial in range(config.trials):
        data_spec = replace(config.data, seed=_data_seed(config, trial))
        clients, test_set, _ = generate(data_spec)
        seed = _algo_seed(config, trial)
        for method in config.methods:
            if method == "OneShot":
                _guarded(records, config.scenario, method, None, trial,
                         lambda: _one_shot_record(config.scenario, None, trial,
                                                  clients, test_set, config.sigma))
                continue
            for epsilon in config.sweep:
                if method == "PrivateOneShot":
                    _guarded(records, config.scenario, method, epsilon, trial,
                             lambda e=epsilon: _private_record(
                                 config.scenario, e, trial, clients, test_set,
                                 config.sigma, config.delta, seed))
                elif method == "DpFedAvg":
                    eps_round = epsilon / np.sqrt(config.rounds)
                    dp = PrivacyParams(epsilon=eps_round, delta=config.delta)
                    it = _iterative_config(config, config.rounds, dp=dp)
                    def build(it=it, e=epsilon, dp=dp):
                        record = _iterative_record(
                            config.scenario, "DpFedAvg", e, trial, clients,
                            test_set, config.sigma, it, seed)
                        record.extra["epsilon_round"] = dp.epsilon
                        return record
                    _guarded(records, config.scenario, method, epsilon, trial, build)
                else:
                    raise ConfigError(
                        f"method {method!r} is not available in scenario "
                        f"{config.scenario!r}")
    return records


def _run_projection(config: ExperimentConfig) -> list[RunRecord]:
    records: list[RunRecord] = []
    for trial in range(config.trials):
        data_spec = replace(config.data, seed=_data_seed(config, trial))
        clients, test_set, _ = generate(data_spec)
        seed = _algo_seed(config, trial)
        for method in config.methods:
            if method != "ProjectedOneShot":
                raise ConfigError(
                    f"method {method!r} is not available in scenario "
                    f"{config.scenario!r}")
            for value in config.sweep:
                target = int(value)
                if float(target) != value:
                    raise ConfigError("projection sweep values must be integers")
                _guarded(records, config.scenario, method, float(target), trial,
                         lambda t=target: _projected_record(
                             config.scenario, t, trial, clients, test_set,
                             config.sigma, seed))
    return records


def _heterogeneity_spec(config: ExperimentConfig, gamma: float, seed: int) -> SynthSpec:
    return replace(config.data, gamma=float(gamma), seed=seed)


def _communication_spec(config: ExperimentConfig, dim: float, seed: int) -> SynthSpec:
    target = int(dim)
    if float(target) != dim:
        raise ConfigError("dimension sweep values must be integers")
    return replace(config.data, dim=target, seed=seed)


def _scalability_spec(config: ExperimentConfig, clients: float, seed: int) -> SynthSpec:
    target = int(clients)
    if float(target) != clients:
        raise ConfigError("client-count sweep values must be integers")
    return replace(config.data, clients=target, seed=seed)


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """Execute a scenario's full method x sweep x trial grid.

    Records come back in canonical order (scenario, method, sweep value,
    trial) regardless of execution order.
    """
    if not config.methods:
        raise ConfigError("config.methods must name at least one method")
    if config.scenario == "Main":
        records = _run_main(config)
    elif config.scenario == "Heterogeneity":
        records = _run_sweep_over_data(config, _heterogeneity_spec)
    elif config.scenario == "Communication":
        records = _run_sweep_over_data(config, _communication_spec)
    elif config.scenario == "Scalability":
        records = _run_sweep_over_data(config, _scalability_spec)
    elif config.scenario == "Convergence":
        records = _run_convergence(config)
    elif config.scenario == "Privacy":
        records = _run_privacy(config)
    elif config.scenario == "Projection":
        records = _run_projection(config)
    else:
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    records.sort(key=lambda r: (r.scenario, r.method,
                                r.sweep_value if r.sweep_value is not None
                                else float("-inf"), r.trial))
    return records


def _format_float(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def _format_int(value: int | None) -> str:
    return "" if value is None else str(int(value))


def emit_results(records: list[RunRecord], format_name: str = "csv",
                 path: str | None = None) -> str:
    """Serialize records as CSV or JSON; returns the text, optionally writes it.

    CSV uses exactly the columns in :data:`CSV_COLUMNS`, newline line
    endings, and 17-significant-digit floats so values round-trip exactly.
    """
    if not records:
        raise ValueError("no records to emit")
    if format_name == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow([
                record.scenario,
                record.method,
                _format_float(record.sweep_value),
                _format_int(record.trial),
                _format_float(record.test_mse),
                _format_int(record.rounds),
                _format_int(record.upload_bytes),
                _format_int(record.download_bytes),
                _format_float(record.wall_time_seconds),
                json.dumps(record.extra, sort_keys=True, separators=(",", ":")),
            ])
        text = buffer.getvalue()
    elif format_name == "json":
        payload = [{
            "scenario": record.scenario,
            "method": record.method,
            "sweep_value": record.sweep_value,
            "trial": record.trial,
            "test_mse": record.test_mse,
            "rounds": record.rounds,
            "upload_bytes": record.upload_bytes,
            "download_bytes": record.download_bytes,
            "wall_time_s": record.wall_time_seconds,
            "extra": record.extra,
        } for record in records]
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown format {format_name!r}; use 'csv' or 'json'")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def parse_results(text: str, format_name: str = "csv") -> list[RunRecord]:
    """Parse text produced by :func:`emit_results` back into records."""
    records: list[RunRecord] = []
    if format_name == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {header}")
        for row in reader:
            if not row:
                continue
            records.append(RunRecord(
                scenario=row[0],
                method=row[1],
                sweep_value=float(row[2]) if row[2] else None,
                trial=int(row[3]),
                test_mse=float(row[4]) if row[4] else None,
                rounds=int(row[5]) if row[5] else None,
                upload_bytes=int(row[6]) if row[6] else 0,
                download_bytes=int(row[7]) if row[7] else 0,
                wall_time_seconds=float(row[8]) if row[8] else 0.0,
                extra=json.loads(row[9]) if row[9] else {},
            ))
    elif format_name == "json":
        for item in json.loads(text):
            records.append(RunRecord(
                scenario=item["scenario"],
                method=item["method"],
                sweep_value=item["sweep_value"],
                trial=item["trial"],
                test_mse=item["test_mse"],
                rounds=item["rounds"],
                upload_bytes=item["upload_bytes"],
                download_bytes=item["download_bytes"],
                wall_time_seconds=item["wall_time_s"],
                extra=item.get("extra", {}),
            ))
    else:
        raise ValueError(f"unknown format {format_name!r}; use 'csv' or 'json'")
    return records


def summarize(records: list[RunRecord]) -> str:
    """Human-readable per-cell aggregate table (mean and std over trials)."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.scenario, record.method, record.sweep_value),
                          []).append(record)
    lines = [f"{'scenario':<14} {'method':<17} {'sweep':>10} {'trials':>6} "
             f"{'mse_mean':>12} {'mse_std':>12} {'upload_MB':>10} "
             f"{'time_ms':>9} {'failed':>6}"]
    for key in sorted(groups, key=lambda k: (k[0], k[1],
                                             k[2] if k[2] is not None
                                             else float("-inf"))):
        scenario, method, sweep_value = key
        cells = groups[key]
        mses = [c.test_mse for c in cells if c.test_mse is not None]
        failed = sum(1 for c in cells if c.extra.get("status") == "failed")
        mse_mean = f"{np.mean(mses):.6g}" if mses else "-"
        mse_std = f"{np.std(mses):.2g}" if len(mses) > 1 else "-"
        upload = np.mean([c.upload_bytes for c in cells]) / 1e6
        wall = np.mean([c.wall_time_seconds for c in cells]) * 1e3
        sweep_text = "-" if sweep_value is None else f"{sweep_value:g}"
        lines.append(f"{scenario:<14} {method:<17} {sweep_text:>10} "
                     f"{len(cells):>6} {mse_mean:>12} {mse_std:>12} "
                     f"{upload:>10.4f} {wall:>9.2f} {failed:>6}")
    return "\n".join(lines) + "\n"


def _parse_methods(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _parse_floats(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {raw!r}") from exc


def load_config(path: str) -> ExperimentConfig:
    """Read an INI experiment config.

    Sections and keys (all optional except [experiment] scenario):

    [experiment]  scenario, methods, trials, base_seed, sigma
    [data]        clients, samples_per_client, dim, gamma, noise_std,
                  test_fraction, dp_normalize
    [iterative]   rounds, learning_rate, local_epochs, proximal_mu,
                  batch_size, fedavg_rounds
    [privacy]     delta
    [sweep]       values (comma-separated numbers)
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    try:
        if "experiment" not in parser or "scenario" not in parser["experiment"]:
            raise ConfigError("config needs [experiment] with a scenario key")
        experiment = parser["experiment"]
        scenario = experiment.get("scenario").strip().title()
        overrides: dict = {}
        if "methods" in experiment:
            overrides["methods"] = _parse_methods(experiment.get("methods"))
        if "trials" in experiment:
            overrides["trials"] = experiment.getint("trials")
        if "base_seed" in experiment:
            overrides["base_seed"] = experiment.getint("base_seed")
        if "sigma" in experiment:
            overrides["sigma"] = experiment.getfloat("sigma")
        if "sweep" in parser and "values" in parser["sweep"]:
            overrides["sweep"] = _parse_floats(parser["sweep"].get("values"))
        if "iterative" in parser:
            section = parser["iterative"]
            if "rounds" in section:
                overrides["rounds"] = section.getint("rounds")
            if "learning_rate" in section:
                overrides["learning_rate"] = section.getfloat("learning_rate")
            if "local_epochs" in section:
                overrides["local_epochs"] = section.getint("local_epochs")
            if "proximal_mu" in section:
                overrides["proximal_mu"] = section.getfloat("proximal_mu")
            if "batch_size" in section:
                overrides["batch_size"] = section.getint("batch_size")
            if "fedavg_rounds" in section:
                overrides["fedavg_rounds"] = tuple(
                    int(v) for v in _parse_floats(section.get("fedavg_rounds")))
        if "privacy" in parser and "delta" in parser["privacy"]:
            overrides["delta"] = parser["privacy"].getfloat("delta")
        if "data" in parser:
            overrides["data"] = _load_data_section(parser["data"], scenario)
        return default_config(scenario, **overrides)
    except (configparser.Error, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc


def _load_data_section(section, scenario: str) -> SynthSpec:
    base = _SCENARIO_DEFAULTS[scenario].get("data", SynthSpec())
    kwargs: dict = {}
    if "clients" in section:
        kwargs["clients"] = section.getint("clients")
    if "samples_per_client" in section:
        kwargs["samples_per_client"] = section.getint("samples_per_client")
    if "dim" in section:
        kwargs["dim"] = section.getint("dim")
    if "gamma" in section:
        kwargs["gamma"] = section.getfloat("gamma")
    if "noise_std" in section:
        kwargs["noise_std"] = section.getfloat("noise_std")
    if "test_fraction" in section:
        kwargs["test_fraction"] = section.getfloat("test_fraction")
    if "dp_normalize" in section:
        kwargs["dp_normalize"] = section.getboolean("dp_normalize")
    if "seed" in section:
        kwargs["seed"] = section.getint("seed")
    return replace(base, **kwargs)


def load_synth_spec(path: str) -> SynthSpec:
    """Read just a [data] section as a SynthSpec (for the datagen command)."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    if "data" not in parser:
        raise ConfigError("config needs a [data] section")
    try:
        return _load_data_section(parser["data"], "Main")
    except (configparser.Error, ValueError) as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
