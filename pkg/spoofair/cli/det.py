"""
``det``: export the DET sweep of one protocol/score pair as CSV.
"""

import argparse
import logging
import sys
from pathlib import Path

from ..core.errors import MissingGroup
from ..repositories import store
from ..schemas import ClassLabel, Polarity, ScoreFormat
from ..services import protocol_io, scoring
from .deps import add_convention_flags, add_input_flags, build_layout

log = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("det", help="Write the DET curve (threshold,fpr,fnr) of one score file")
    parser.add_argument("--protocol", type=Path, required=True)
    parser.add_argument("--scores", type=Path, required=True)
    parser.add_argument("--group", help="Restrict to one group")
    parser.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    add_convention_flags(parser)
    add_input_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    trials = protocol_io.parse_protocol(store.read_input(args.protocol), build_layout(args), name=str(args.protocol))
    scores = protocol_io.read_scores(
        store.read_input(args.scores), ScoreFormat(args.score_format or "score"), name=str(args.scores)
    )
    positive_class = ClassLabel(args.positive_class or ClassLabel.spoof.value)
    joined = protocol_io.join_trials(trials, scores, Polarity.higher_bonafide, positive_class, bool(args.allow_orphans))
    if args.polarity == "auto":
        joined = joined.with_convention(polarity=scoring.resolve_polarity(joined))
    elif args.polarity:
        joined = joined.with_convention(polarity=Polarity(args.polarity))

    subset = joined
    if args.group:
        parts = protocol_io.partition_by_group(joined)
        group = args.group.strip().upper()
        if group not in parts.groups:
            raise MissingGroup(group, parts.groups)
        subset = parts.groups[group]

    curve = scoring.compute_det(subset)
    eer, threshold = scoring.compute_eer(curve)
    payload = scoring.det_to_csv(curve)
    if args.out:
        store.write_outputs(args.out.parent, {args.out.name: payload})
    else:
        sys.stdout.write(payload.decode("utf-8"))
    log.info("DET: %d points, EER=%.4f at oriented threshold %r", len(curve), eer, threshold)
    return 0
