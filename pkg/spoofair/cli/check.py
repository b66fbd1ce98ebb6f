"""
``check``: parse and validate input files without evaluating; prints counts as JSON.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict

import numpy as np

from ..repositories import store
from ..schemas import ScoreFormat
from ..services import protocol_io
from .deps import add_input_flags, build_layout

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="Validate a protocol (and optionally its scores)")
    parser.add_argument("--protocol", type=Path, required=True)
    parser.add_argument("--scores", type=Path)
    add_input_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    trials = protocol_io.parse_protocol(store.read_input(args.protocol), build_layout(args), name=str(args.protocol))
    report: Dict[str, Any] = {"protocol": str(args.protocol), "n_trials": len(trials)}
    if args.scores is not None:
        scores = protocol_io.read_scores(
            store.read_input(args.scores), ScoreFormat(args.score_format or "score"), name=str(args.scores)
        )
        joined = protocol_io.join_trials(trials, scores, allow_orphans=bool(args.allow_orphans))
        report["scores"] = str(args.scores)
        report["n_scores"] = len(scores)
        report.update(joined.summary())
    else:
        names, counts = np.unique(trials.groups, return_counts=True)
        n_spoof = int(trials.is_spoof.sum())
        report["per_group"] = {str(g): int(c) for g, c in zip(names, counts)}
        report["per_class"] = {"bonafide": len(trials) - n_spoof, "spoof": n_spoof}
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0
