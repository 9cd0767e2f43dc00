"""Command-line front end for the experiment runner.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (DEFAULT_RANDOM_CHANNEL, DEFAULT_SINR_GRID_DB,
                          EXPERIMENTS, SCHEMES, ExperimentConfig, run)

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the CLI contract reserves 2 for runtime
    # failures, so route usage problems through our own exception instead.
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="mlceq",
        description="Run multilevel-coding/LMMSE experiments and write CSV "
                    "result tables.")
    parser.add_argument("--experiment", choices=EXPERIMENTS,
                        help="which experiment to run")
    parser.add_argument("--channel",
                        help="named channel (h1, h2), 'random:<taps>,<seed>', "
                             "or comma-separated taps")
    parser.add_argument("--snr-db", dest="snr_db",
                        help="comma-separated SNR (or input-SINR) grid in dB")
    parser.add_argument("--layers",
                        help="comma-separated layer counts M")
    parser.add_argument("--scheme", choices=SCHEMES,
                        help="power allocation scheme for rate sweeps")
    parser.add_argument("--half-window", dest="half_window", type=int,
                        help="LMMSE half window L_g (filter has 2*L_g+1 taps)")
    parser.add_argument("--samples", type=int,
                        help="Monte Carlo interior symbols per layer")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--config", help="JSON file supplying any subset of "
                                         "the above; CLI flags override it")
    return parser


def _parse_list(value, cast):
    if isinstance(value, (list, tuple)):
        return tuple(cast(v) for v in value)
    return tuple(cast(v) for v in str(value).split(","))


def parse_cli(argv) -> ExperimentConfig:
    """Merge CLI flags over an optional JSON config file into an
    ExperimentConfig.  Raises UsageError on missing or malformed input."""
    parser = build_parser()
    if not argv:
        raise UsageError(parser.format_usage().strip())
    args = parser.parse_args(argv)

    file_values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(file_values, dict):
            raise UsageError(f"config file {args.config} must hold a JSON object")

    def pick(key, cli_value):
        return cli_value if cli_value is not None else file_values.get(key)

    experiment = pick("experiment", args.experiment)
    if experiment is None:
        raise UsageError("--experiment is required (flag or config file)")

    values = {
        "experiment": experiment,
        "channel": pick("channel", args.channel),
        "snr_grid_db": pick("snr_db", args.snr_db),
        "layer_counts": pick("layers", args.layers),
        "scheme": pick("scheme", args.scheme),
        "half_window": pick("half_window", args.half_window),
        "samples": pick("samples", args.samples),
        "seed": pick("seed", args.seed),
        "out": pick("out", args.out),
    }
    # the convergence experiment defaults to its own channel and SINR grid
    if experiment == "theorem1":
        values.setdefault("channel", None)
        if values["channel"] is None:
            values["channel"] = DEFAULT_RANDOM_CHANNEL
        if values["snr_grid_db"] is None:
            values["snr_grid_db"] = DEFAULT_SINR_GRID_DB
    if values["snr_grid_db"] is not None:
        values["snr_grid_db"] = _parse_list(values["snr_grid_db"], float)
    if values["layer_counts"] is not None:
        values["layer_counts"] = _parse_list(values["layer_counts"], int)

    kwargs = {k: v for k, v in values.items() if v is not None or k == "out"}
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_cli(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(build_parser().format_usage().strip(), file=sys.stderr)
        return USAGE_EXIT
    try:
        for path in run(config):
            print(path)
    except Exception as exc:  # noqa: BLE001 - surface as runtime exit code
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
