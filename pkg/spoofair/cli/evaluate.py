"""
``eval``: run a full fairness evaluation from a TOML run config and/or flags.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict

from ..adapters import renderers
from ..core.config import settings
from ..core.errors import ConfigError
from ..repositories import store
from ..services import orchestrator
from .deps import add_convention_flags, add_input_flags, add_report_flags, parse_groups, parse_layout

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate group fairness of one or more systems")
    parser.add_argument("--config", type=Path, help="TOML run config")
    parser.add_argument("--system", default="system", help="System name when paths are given as flags")
    parser.add_argument("--dev-protocol", type=Path)
    parser.add_argument("--dev-scores", type=Path)
    parser.add_argument("--eval-protocol", type=Path)
    parser.add_argument("--eval-scores", type=Path)
    add_convention_flags(parser)
    add_input_flags(parser)
    add_report_flags(parser)
    parser.set_defaults(handler=handle)


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "polarity": args.polarity,
        "positive_class": args.positive_class,
        "score_format": args.score_format,
        "allow_orphans": args.allow_orphans,
        "alpha": args.alpha,
        "eo_variant": args.eo_variant,
        "te_variant": args.te_variant,
        "holm_family": args.holm_family,
        "formats": args.formats,
        "out_dir": args.out_dir,
        "with_auc": args.with_auc,
        "timestamp": args.timestamp,
        "groups": parse_groups(args.groups),
        "layout": parse_layout(args.layout, args.delimiter),
    }
    paths = {
        "dev_protocol": args.dev_protocol,
        "dev_scores": args.dev_scores,
        "eval_protocol": args.eval_protocol,
        "eval_scores": args.eval_scores,
    }
    given = {k: str(v) for k, v in paths.items() if v is not None}
    if given:
        if len(given) != len(paths):
            missing = sorted(set(paths) - set(given))
            raise ConfigError(f"system paths given as flags are incomplete, missing: {', '.join(missing)}")
        overrides["systems"] = {args.system: given}
    return overrides


def handle(args: argparse.Namespace) -> int:
    overrides = overrides_from_args(args)
    if args.config is not None:
        config = store.load_run_config(args.config, overrides)
    elif "systems" in overrides:
        config = store.build_run_config({}, overrides)
    else:
        raise ConfigError("eval needs --config or the four --dev/--eval path flags")

    bundle = orchestrator.run(config)
    files: Dict[str, bytes] = {}
    for fmt in config.formats:
        files.update(renderers.render(bundle, fmt))
    out_dir = config.out_dir or settings.out_dir
    written = store.write_outputs(out_dir, files)
    for name in sorted(written):
        print(written[name])
    return 0
