"""Command-line driver.

Subcommands:
  estimate  bound estimates from three sample files, JSON output
  run       a configured experiment, CSV trajectories into a directory
  coupling  the coupled-pair baseline, CSV output
  convert   sample matrices between CSV and the binary format

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure. WB_WORKERS (positive integer) caps worker threads.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .coupling import UnmetPairsError
from .experiments import (
    estimate_from_files,
    run_coupling_baseline,
    run_gibbs_ar1,
    run_stochastic_volatility,
    run_ula_mala_scaling,
)
from .mcmc import NumericalError
from .samplefile import DataError, read_csv_samples, read_samples, write_csv_samples, write_samples

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wassbound",
        description="Empirical bounds on squared 2-Wasserstein distances",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="bound estimates from three sample files")
    est.add_argument("--nu", required=True, help="samples from the distribution of interest")
    est.add_argument("--mu", required=True, help="reference samples (independent of the others)")
    est.add_argument("--mu-prime", required=True, help="second reference sample set")
    est.add_argument("--alpha", type=float, default=0.05)
    est.add_argument("--out", required=True, help="output JSON path")

    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory")

    cpl = sub.add_parser("coupling", help="run the coupled-pair baseline")
    cpl.add_argument("--config", required=True)
    cpl.add_argument("--out", required=True, help="output directory")

    conv = sub.add_parser("convert", help="convert sample matrices between CSV and binary")
    group = conv.add_mutually_exclusive_group(required=True)
    group.add_argument("--csv", help="input CSV to convert to binary")
    group.add_argument("--bin", help="input binary to convert to CSV")
    conv.add_argument("--out", required=True)
    return parser


def _cmd_estimate(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise ConfigError("alpha must lie strictly inside (0, 1)")
    try:
        estimate_from_files(args.nu, args.mu, args.mu_prime, args.alpha, args.out)
    except ValueError as exc:
        if isinstance(exc, (DataError, ConfigError)):
            raise
        raise DataError(str(exc)) from exc
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if cfg.experiment == "gibbs_ar1":
        run_gibbs_ar1(cfg, args.out)
    elif cfg.experiment == "ula_mala_scaling":
        run_ula_mala_scaling(cfg, args.out)
    elif cfg.experiment == "stochastic_volatility":
        run_stochastic_volatility(cfg, args.out)
    elif cfg.experiment == "estimate_from_samples":
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        estimate_from_files(
            cfg["nu"], cfg["mu"], cfg["mu_prime"], cfg["alpha"], out_dir / "estimate.json"
        )
    else:
        raise ConfigError(
            f"experiment {cfg.experiment!r} belongs to the coupling subcommand"
        )
    return EXIT_OK


def _cmd_coupling(args) -> int:
    cfg = load_config(args.config)
    if cfg.experiment != "coupling_baseline":
        raise ConfigError("the coupling subcommand needs experiment='coupling_baseline'")
    run_coupling_baseline(cfg, args.out)
    return EXIT_OK


def _cmd_convert(args) -> int:
    if args.csv is not None:
        write_samples(args.out, read_csv_samples(args.csv))
    else:
        write_csv_samples(args.out, read_samples(args.bin))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "estimate": _cmd_estimate,
        "run": _cmd_run,
        "coupling": _cmd_coupling,
        "convert": _cmd_convert,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"wassbound: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"wassbound: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, UnmetPairsError) as exc:
        print(f"wassbound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"wassbound: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
