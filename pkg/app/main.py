"""
Command-line entry point.

    python -m app.main run --target gaussian --dim 10 --sampler barker --iters 30000
    python -m app.main grid --synthetic --workers 4
    python -m app.main skewstudy --eta 1 10 100 1000
    python -m app.main jumpbias --proposal-std 0.4 0.2 0.1
    python -m app.main selftest

Exit codes: 0 success (including chains that failed scientifically), 1 runtime
error, 2 configuration error.
"""

import argparse
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import ConfigError, ExperimentConfig, settings
from app.core.data import DataError
from app.core.logger import get_logger
from app.experiments.grid import cmd_grid
from app.experiments.jump_bias import DEFAULT_DURATION, DEFAULT_PROPOSAL_STDS, cmd_jumpbias
from app.experiments.run import cmd_run
from app.experiments.selftest import cmd_selftest
from app.experiments.skew_study import DEFAULT_ETAS, cmd_skewstudy

logger = get_logger("CLI")

# flag dest -> ExperimentConfig field
CONFIG_FLAGS = [
    "target", "dim", "eta", "prior_variance", "dataset", "synthetic", "header", "label_column",
    "positive_class", "missing_markers", "select_covariates", "n_imbalanced", "n_regular",
    "rarity_threshold", "standardize", "include_intercept", "sampler", "iters", "seed",
    "chains", "adapt", "precond", "target_accept", "learning_exponent", "use_indicator",
    "covariance_offset", "covariance_exponent", "dense_warmup", "global_scale", "burn_in_frac", "out",
]


def _add_config_flags(parser: argparse.ArgumentParser):
    # every default is None so unset flags never override the config file
    parser.add_argument("--config", help="flat key=value file; flags override it")
    parser.add_argument("--target", choices=["gaussian", "skew-normal", "logistic"])
    parser.add_argument("--dim", type=int)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--prior-variance", type=float)
    parser.add_argument("--dataset", help="CSV file for the logistic target")
    parser.add_argument("--synthetic", action="store_true", default=None, help="use synthetic imbalanced data")
    parser.add_argument("--no-header", dest="header", action="store_false", default=None)
    parser.add_argument("--label-column", help="label column name or index (default -1)")
    parser.add_argument("--positive-class")
    parser.add_argument("--missing-markers", help="comma-separated markers (default '?,')")
    parser.add_argument("--no-select", dest="select_covariates", action="store_false", default=None)
    parser.add_argument("--n-imbalanced", type=int)
    parser.add_argument("--n-regular", type=int)
    parser.add_argument("--rarity-threshold", type=int)
    parser.add_argument("--standardize", action="store_true", default=None)
    parser.add_argument("--no-intercept", dest="include_intercept", action="store_false", default=None)
    parser.add_argument("--sampler", choices=["rwm", "mala", "barker", "barker-global"])
    parser.add_argument("--iters", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--chains", type=int)
    parser.add_argument("--no-adapt", dest="adapt", action="store_false", default=None)
    parser.add_argument("--precond", choices=["dense", "diag"])
    parser.add_argument("--target-accept", type=float)
    parser.add_argument("--learning-exponent", type=float)
    parser.add_argument("--use-indicator", action="store_true", default=None)
    parser.add_argument("--covariance-offset", type=int)
    parser.add_argument("--covariance-exponent", type=float, help="mean/covariance learning exponent (default 0.85)")
    parser.add_argument("--dense-warmup", type=int, help="updates preconditioned with diag(Sigma) in dense mode")
    parser.add_argument("--global-scale", type=float)
    parser.add_argument("--burn-in-frac", type=float)
    parser.add_argument("--out", help=f"output directory (default {settings.OUTPUT_DIR}/latest)")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {name: getattr(args, name) for name in CONFIG_FLAGS}
    return ExperimentConfig.from_sources(args.config, overrides)


def _run(args: argparse.Namespace) -> int:
    return cmd_run(_config_from_args(args))


def _grid(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    if "iters" not in config.model_fields_set:
        config = config.model_copy(update={"iters": settings.GRID_ITERATIONS})
    return cmd_grid(config, workers=args.workers)


def _skewstudy(args: argparse.Namespace) -> int:
    return cmd_skewstudy(args.out, args.eta, args.x, args.y, args.step_size)


def _jumpbias(args: argparse.Namespace) -> int:
    return cmd_jumpbias(args.out, args.proposal_std, args.duration, args.paths, args.seed)


def _selftest(args: argparse.Namespace) -> int:
    return cmd_selftest()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="barker", description="Barker-proposal MCMC experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run chains on one target")
    _add_config_flags(run)
    run.set_defaults(handler=_run)

    grid = commands.add_parser("grid", help="raw/standardized x dense/diag x mala/barker logistic grid")
    _add_config_flags(grid)
    grid.add_argument("--workers", type=int, help=f"worker processes (default {settings.GRID_WORKERS})")
    grid.set_defaults(handler=_grid)

    default_out = os.path.join(settings.OUTPUT_DIR, "latest")

    skew = commands.add_parser("skewstudy", help="MALA vs Barker acceptance on skew-normal targets")
    skew.add_argument("--eta", type=float, nargs="+", default=list(DEFAULT_ETAS))
    skew.add_argument("--x", type=float, default=1.5)
    skew.add_argument("--y", type=float, default=0.0)
    skew.add_argument("--step-size", type=float, default=1.0)
    skew.add_argument("--out", default=default_out)
    skew.set_defaults(handler=_skewstudy)

    jump = commands.add_parser("jumpbias", help="invariant-variance bias of the unadjusted jump process")
    jump.add_argument("--proposal-std", type=float, nargs="+", default=list(DEFAULT_PROPOSAL_STDS))
    jump.add_argument("--duration", type=float, default=DEFAULT_DURATION)
    jump.add_argument("--paths", type=int, default=None, help=f"paths per std (default {settings.JUMP_PATHS})")
    jump.add_argument("--seed", type=int, default=0)
    jump.add_argument("--out", default=default_out)
    jump.set_defaults(handler=_jumpbias)

    selftest = commands.add_parser("selftest", help="run the fast oracle suites")
    selftest.set_defaults(handler=_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, DataError, ValidationError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
