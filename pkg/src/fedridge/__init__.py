"""Federated ridge regression via one-round sufficient-statistic fusion.

Clients summarize their rows as a packed Gram matrix and a moment vector,
upload those once, and the server solves the pooled ridge system. The
result matches the centralized solution exactly, for any partition of the
rows and any subset of clients. The rest of the package stress-tests that
claim: differentially private uploads, random-projection sketching for
high dimensions, iterative baselines to compare against, synthetic data
with a heterogeneity dial, leave-one-client-out selection of the ridge
strength, and a deterministic benchmark harness with a CLI.
"""

from .baselines import (
    DIVERGENCE_NORM,
    GradientGapReport,
    IterativeConfig,
    gradient_insufficiency_check,
    run_fedavg,
    run_fedprox,
)
from .bench import (
    CSV_COLUMNS,
    METHODS,
    SCENARIOS,
    ExperimentConfig,
    RunRecord,
    default_config,
    emit_results,
    load_config,
    load_synth_spec,
    parse_results,
    run_experiment,
    summarize,
)
from .cli import main
from .crossval import CvReport, federated_locov, leave_one_out_model
from .datagen import SynthSpec, dp_normalize_rows, generate, load_datasets, save_datasets
from .errors import (
    ConfigError,
    DimensionMismatchError,
    DivergenceError,
    FedRidgeError,
    NormalizationError,
    RidgeSolveError,
)
from .privacy import (
    NoisedStats,
    PrivacyParams,
    compute_private_stats,
    iterative_privacy_loss,
    noise_scale,
    private_one_shot,
    privatize_stats,
)
from .projection import (
    ProjectionSpec,
    back_projected_weights,
    project_dataset,
    projection_error_bound,
    projection_matrix,
    run_projected_one_shot,
)
from .protocol import (
    BYTES_PER_FLOAT,
    FederationRun,
    StatsMessage,
    communication_budget,
    efficiency_threshold,
    iterative_total_floats,
    one_shot_total_floats,
    run_one_shot,
)
from .stats import (
    RESIDUAL_RTOL,
    ClientDataset,
    Provenance,
    RidgeModel,
    SufficientStats,
    compute_local_stats,
    condition_number,
    coverage,
    mean_squared_error,
    merge_stats,
    pack_upper,
    packed_length,
    ridge_solve,
    subtract_stats,
    unpack_upper,
)

__version__ = "0.1.0"

__all__ = [
    "BYTES_PER_FLOAT",
    "CSV_COLUMNS",
    "ClientDataset",
    "ConfigError",
    "CvReport",
    "DIVERGENCE_NORM",
    "DimensionMismatchError",
    "DivergenceError",
    "ExperimentConfig",
    "FedRidgeError",
    "FederationRun",
    "GradientGapReport",
    "IterativeConfig",
    "METHODS",
    "NoisedStats",
    "NormalizationError",
    "PrivacyParams",
    "Provenance",
    "ProjectionSpec",
    "RESIDUAL_RTOL",
    "RidgeModel",
    "RidgeSolveError",
    "RunRecord",
    "SCENARIOS",
    "StatsMessage",
    "SufficientStats",
    "SynthSpec",
    "back_projected_weights",
    "communication_budget",
    "compute_local_stats",
    "compute_private_stats",
    "condition_number",
    "coverage",
    "default_config",
    "dp_normalize_rows",
    "efficiency_threshold",
    "emit_results",
    "federated_locov",
    "generate",
    "gradient_insufficiency_check",
    "iterative_privacy_loss",
    "iterative_total_floats",
    "leave_one_out_model",
    "load_config",
    "load_datasets",
    "load_synth_spec",
    "main",
    "mean_squared_error",
    "merge_stats",
    "noise_scale",
    "one_shot_total_floats",
    "pack_upper",
    "packed_length",
    "parse_results",
    "private_one_shot",
    "privatize_stats",
    "project_dataset",
    "projection_error_bound",
    "projection_matrix",
    "ridge_solve",
    "run_experiment",
    "run_fedavg",
    "run_fedprox",
    "run_one_shot",
    "run_projected_one_shot",
    "save_datasets",
    "subtract_stats",
    "summarize",
    "unpack_upper",
]
