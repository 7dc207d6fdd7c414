#!/usr/bin/env python3
"""
Command-line front end for the Zeeman cavity simulator.

Configuration is resolved as dataclass defaults < ZEEMAN_* environment
variables < --config JSON file < command-line flags, then handed to the
runner. All times are in dimensionless gt.
"""

import argparse
import logging
import sys
from typing import List, Optional

from zeeman_cavity.config import OUTPUT_FORMATS, PICTURES, PROTOCOLS, RunConfig
from zeeman_cavity.errors import ConfigError
from zeeman_cavity.runner import EXIT_CONFIG, EXIT_IO, run

logger = logging.getLogger(__name__)


def _complex_pair(text: str) -> List[float]:
    parts = text.split(',')
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're,im', got '{text}'")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeeman-cavity",
        description="Two three-level atoms in a cavity: evolution, closed-form checks and entanglement protocols",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="JSON config file")
    common.add_argument('--g', type=float, help="atom-field coupling")
    common.add_argument('--alpha', type=float, help="dipole-dipole coupling")
    common.add_argument('--omega', type=float, help="cavity frequency")
    common.add_argument('--beta', type=float, help="Zeeman splitting")
    common.add_argument('--out', dest='output',
                        help="output path (default: stdout; CSV on stdout logs its config to stderr)")
    common.add_argument('--format', choices=OUTPUT_FORMATS)
    common.add_argument('--seed', type=int)
    common.add_argument('--parallel', action='store_true', default=None,
                        help="evaluate grid points concurrently")
    common.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    commands = parser.add_subparsers(dest='protocol', required=True)
    for name in PROTOCOLS:
        sub = commands.add_parser(name, parents=[common])
        if name in ("evolve", "verify"):
            sub.add_argument('--t', type=float, help="single gt instead of the grid")
            sub.add_argument('--grid', nargs=3, type=float, metavar=('START', 'STOP', 'STEPS'))
        if name == "evolve":
            sub.add_argument('--initial', help="initial basis state 'n,m1,m2'")
            sub.add_argument('--picture', choices=PICTURES)
        if name == "verify":
            sub.add_argument('--tolerance', type=float)
        if name in ("epr", "exchange", "transfer", "feedback"):
            sub.add_argument('--n-period', dest='n_period', type=int)
        if name == "exchange":
            sub.add_argument('--input', dest='exchange_input', help="input state 'm1,m2' with vacuum field")
            sub.add_argument('--picture', choices=PICTURES)
        if name == "transfer":
            sub.add_argument('--c1', type=_complex_pair, help="'re,im'")
            sub.add_argument('--c2', type=_complex_pair, help="'re,im'")
        if name == "feedback":
            sub.add_argument('--cycles', type=int)
            sub.add_argument('--drift', dest='drift_rate', type=float, help="relative g drift per cycle")
            sub.add_argument('--gamma', type=float, help="phenomenological damping rate")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < environment < config file < flags."""
    config = RunConfig.from_environment()
    if args.config:
        config = RunConfig.from_file(args.config, base=config)
    overrides = {k: v for k, v in vars(args).items() if k not in ('config', 'log_level', 'grid')}
    grid = getattr(args, 'grid', None)
    if grid is not None:
        if int(grid[2]) != grid[2]:
            raise ConfigError("grid_steps", f"must be an integer, got {grid[2]}")
        overrides.update(grid_start=grid[0], grid_stop=grid[1], grid_steps=int(grid[2]))
    return config.with_overrides(**overrides)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)]
    )

    try:
        config = resolve_config(args)
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Cannot read configuration: {e}")
        return EXIT_IO

    logger.info(f"Running '{config.protocol}' with {config.params}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
