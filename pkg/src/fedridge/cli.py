"""Command-line front end.

Subcommands:

========  ==============================================================
datagen   generate a synthetic federation and write it to a dataset file
run       execute one experiment config, write records as CSV or JSON
sweep     scenario shorthand (grid flags instead of a config file)
cv        federated leave-one-client-out selection of sigma
report    aggregate a results file into per-method means and stds
========  ==============================================================

Exit codes: 0 on success, 1 on configuration or usage errors, 2 on
runtime failures (solver errors, unwritable paths).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bench import (
    METHODS,
    SCENARIOS,
    default_config,
    emit_results,
    load_config,
    load_synth_spec,
    parse_results,
    run_experiment,
    summarize,
)
from .crossval import federated_locov
from .datagen import SynthSpec, generate, save_datasets
from .errors import ConfigError, FedRidgeError


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors raise instead of exiting with 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _parse_float_list(raw: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {raw!r}") from exc
    if not values:
        raise ConfigError(f"{flag} expects at least one value")
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="fedridge",
                     description="Federated ridge regression benchmark toolkit.")
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

    datagen = subparsers.add_parser(
        "datagen", help="generate a synthetic dataset file")
    datagen.add_argument("--config", help="INI file with a [data] section")
    datagen.add_argument("--out", required=True, help="dataset file to write")
    datagen.add_argument("--test-out",
                         help="optional separate file for the holdout split")
    datagen.add_argument("--seed", type=int, help="override the data seed")
    datagen.set_defaults(handler=_cmd_datagen)

    run = subparsers.add_parser(
        "run", help="execute one experiment config file")
    run.add_argument("--config", required=True, help="INI experiment config")
    run.add_argument("--out", help="results file (stdout when omitted)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--seed", type=int, help="override base_seed")
    run.set_defaults(handler=_cmd_run)

    sweep = subparsers.add_parser(
        "sweep", help="run a scenario from shorthand flags")
    sweep.add_argument("--scenario", required=True,
                       help="one of: " + ", ".join(s.lower() for s in SCENARIOS))
    sweep.add_argument("--eps", help="epsilon grid (privacy scenario)")
    sweep.add_argument("--dims", help="dimension grid (communication scenario)")
    sweep.add_argument("--gammas", help="gamma grid (heterogeneity scenario)")
    sweep.add_argument("--clients", help="client-count grid (scalability scenario)")
    sweep.add_argument("--proj-dims", help="sketch-width grid (projection scenario)")
    sweep.add_argument("--values", help="generic sweep grid for the scenario")
    sweep.add_argument("--methods", help="comma-separated method subset")
    sweep.add_argument("--trials", type=int, help="trials per cell")
    sweep.add_argument("--rounds", type=int, help="iterative round budget")
    sweep.add_argument("--sigma", type=float, help="ridge strength")
    sweep.add_argument("--seed", type=int, help="base seed")
    sweep.add_argument("--out", help="results file (stdout when omitted)")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.set_defaults(handler=_cmd_sweep)

    cv = subparsers.add_parser(
        "cv", help="federated leave-one-client-out sigma selection")
    cv.add_argument("--sigmas", required=True,
                    help="comma-separated sigma grid")
    cv.add_argument("--config", help="INI file with a [data] section")
    cv.add_argument("--seed", type=int, help="override the data seed")
    cv.set_defaults(handler=_cmd_cv)

    report = subparsers.add_parser(
        "report", help="summarize a results file")
    report.add_argument("results", help="CSV or JSON results file")
    report.add_argument("--format", choices=("csv", "json"),
                        help="override format detection by extension")
    report.set_defaults(handler=_cmd_report)

    return parser


def _load_spec(args) -> SynthSpec:
    spec = load_synth_spec(args.config) if args.config else SynthSpec()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        spec = replace(spec, seed=args.seed)
    return spec


def _cmd_datagen(args) -> int:
    spec = _load_spec(args)
    clients, test_set, _ = generate(spec)
    save_datasets(args.out, clients)
    print(f"wrote {len(clients)} clients x dim {spec.dim} to {args.out}")
    if args.test_out:
        save_datasets(args.test_out, [test_set])
        print(f"wrote holdout ({test_set.n_samples} rows) to {args.test_out}")
    return 0


def _emit(records, format_name: str, out: str | None) -> None:
    text = emit_results(records, format_name, out)
    if out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(records)} records to {out}", file=sys.stderr)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        config = replace(config, base_seed=args.seed)
    records = run_experiment(config)
    _emit(records, args.format, args.out)
    return 0


_SWEEP_FLAGS = {
    "Privacy": "eps",
    "Communication": "dims",
    "Heterogeneity": "gammas",
    "Scalability": "clients",
    "Projection": "proj_dims",
}


def _cmd_sweep(args) -> int:
    scenario = args.scenario.strip().title()
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {args.scenario!r}; expected one of "
            + ", ".join(s.lower() for s in SCENARIOS))
    overrides: dict = {}
    grid = None
    for flag_scenario, attr in _SWEEP_FLAGS.items():
        raw = getattr(args, attr)
        if raw is None:
            continue
        if scenario != flag_scenario:
            raise ConfigError(
                f"--{attr.replace('_', '-')} only applies to the "
                f"{flag_scenario.lower()} scenario")
        grid = _parse_float_list(raw, f"--{attr.replace('_', '-')}")
    if args.values is not None:
        if grid is not None:
            raise ConfigError("give either a scenario grid flag or --values, not both")
        grid = _parse_float_list(args.values, "--values")
    if grid is not None:
        overrides["sweep"] = grid
    if args.methods is not None:
        methods = tuple(part.strip() for part in args.methods.split(",")
                        if part.strip())
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; expected subset of "
                              + ", ".join(METHODS))
        overrides["methods"] = methods
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.rounds is not None:
        overrides["rounds"] = args.rounds
    if args.sigma is not None:
        overrides["sigma"] = args.sigma
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        overrides["base_seed"] = args.seed
    config = default_config(scenario, **overrides)
    records = run_experiment(config)
    _emit(records, args.format, args.out)
    return 0


def _cmd_cv(args) -> int:
    grid = _parse_float_list(args.sigmas, "--sigmas")
    spec = _load_spec(args)
    clients, _, _ = generate(spec)
    try:
        report = federated_locov(clients, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mean_losses = report.total_loss() / len(report.client_ids)
    print(f"{'sigma':>12}  {'mean_heldout_mse':>18}")
    for sigma, mean_loss in zip(report.sigma_grid, mean_losses):
        marker = "  <- selected" if sigma == report.selected_sigma else ""
        print(f"{sigma:>12.6g}  {mean_loss:>18.10g}{marker}")
    print(f"sigma_star = {report.selected_sigma:.6g}")
    print(f"extra upload: {report.extra_upload_floats} floats "
          f"({report.extra_upload_bytes} bytes)")
    return 0


def _cmd_report(args) -> int:
    format_name = args.format
    if format_name is None:
        format_name = "json" if args.results.endswith(".json") else "csv"
    try:
        with open(args.results, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read results file: {exc}") from exc
    try:
        records = parse_results(text, format_name)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"malformed results file: {exc}") from exc
    if not records:
        raise ConfigError("results file contains no records")
    sys.stdout.write(summarize(records))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except SystemExit as exit_:
        return int(exit_.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.handler(args)
    except ConfigError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except FedRidgeError as error:
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 2
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())
