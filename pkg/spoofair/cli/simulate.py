"""
``simulate``: write a synthetic two-group scenario (protocols, scores, manifests, run.toml).
"""

import argparse
import logging
from pathlib import Path

from ..core.config import settings
from ..core.errors import ConfigError
from ..repositories import store
from ..services import simgen
from .deps import parse_groups

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Generate a synthetic evaluation scenario")
    parser.add_argument("--scenario", choices=simgen.SCENARIOS, default="symmetric")
    parser.add_argument("--n-per-cell", type=int, default=1000, help="Eval trials per (group, class) cell")
    parser.add_argument("--dev-per-cell", type=int, help="Dev trials per cell (default: n-per-cell / 10)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shift", type=float, default=0.5, help="Spoof shift for the first group, in sigmas (biased)")
    parser.add_argument("--systems", type=int, default=1, help="Number of simulated systems")
    parser.add_argument("--groups", help="Group pair, e.g. 'F,M'")
    parser.add_argument("--out-dir", type=Path, help="Output directory (default: <out_dir>/sim)")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.n_per_cell < 1 or args.systems < 1 or (args.dev_per_cell is not None and args.dev_per_cell < 1):
        raise ConfigError("--n-per-cell, --dev-per-cell and --systems must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise ConfigError(f"--seed must lie in [0, 2**64), got {args.seed}")
    groups = parse_groups(args.groups) or ("F", "M")
    files = simgen.scenario_files(
        args.scenario,
        args.n_per_cell,
        args.seed,
        shift=args.shift,
        systems=args.systems,
        groups=groups,
        dev_per_cell=args.dev_per_cell,
    )
    out_dir = args.out_dir or Path(settings.out_dir) / "sim"
    written = store.write_outputs(out_dir, files)
    print(written["run.toml"])
    return 0
