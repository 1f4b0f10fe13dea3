"""
Trotter Error Statistics Toolkit - Main Application

Command-line runner for the Trotter error statistics experiments. Each subcommand
reproduces one data pipeline from a declarative TOML or JSON config:
variance against time under local unitaries, kurtosis against magic under global
Cliffords, joint local-Clifford distributions, resource growth and the long-time
error. Results are written as one CSV per experiment plus a JSON sidecar.
"""

import argparse
import json
import sys
from typing import List, Optional

from components import EXPERIMENT_MODULES, EXPERIMENT_RUNNERS
from components.runner import execute
from utils.config import EXPERIMENTS, apply_overrides, load_config
from utils.exceptions import ConfigError, DimensionLimitError, TrotterStatsError
from utils.helpers import __version__, convert_for_json
from utils.logger import app_logger, set_global_level

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_LIMIT = 3


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subcommand per experiment.

    Returns:
        argparse.ArgumentParser: The parser
    """
    parser = argparse.ArgumentParser(prog='app.py', description='Trotter error statistics experiments')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='experiment', required=True)
    for name in EXPERIMENTS:
        module = EXPERIMENT_MODULES[name]
        sub = subparsers.add_parser(name, help=module.DESCRIPTION,
                                    description=f"{module.DESCRIPTION}. CSV columns: {module.CSV_COLUMNS}")
        sub.add_argument('--config', help='TOML or JSON config file; defaults apply when omitted')
        sub.add_argument('--seed', type=int, help='Master seed')
        sub.add_argument('--out-dir', help='Output directory')
        sub.add_argument('--workers', type=int, help='Worker processes for sampling')
        sub.add_argument('--samples-override', type=int, help='Samples per point, replacing the config value')
        sub.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')
        sub.add_argument('--validate-only', action='store_true',
                         help='Load and validate the config, print it and exit')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one experiment from the command line.

    Args:
        argv (Optional[List[str]]): Arguments without the program name

    Returns:
        int: 0 on success, 2 on a config error, 3 on a numeric limit, 1 otherwise
    """
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_global_level(args.log_level)
    try:
        config = load_config(args.config, args.experiment)
        config = apply_overrides(config, seed=args.seed, out_dir=args.out_dir, workers=args.workers,
                                 samples=args.samples_override)
        if args.validate_only:
            print(json.dumps(convert_for_json(config.to_dict()), indent=2, sort_keys=True))
            return EXIT_OK
        execute(config, EXPERIMENT_RUNNERS[args.experiment])
        return EXIT_OK
    except ConfigError as e:
        app_logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except DimensionLimitError as e:
        app_logger.error(f"Numeric limit exceeded: {e}")
        return EXIT_LIMIT
    except TrotterStatsError as e:
        app_logger.exception(f"Experiment failed: {e}")
        return EXIT_UNEXPECTED
    except Exception as e:
        app_logger.exception(f"Unexpected error: {e}")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
