import argparse
from typing import Any, Dict, Optional

from ..core.errors import ConfigError
from ..schemas import (
    ClassLabel,
    ColumnLayout,
    EoVariant,
    HolmFamily,
    Polarity,
    ReportFormat,
    ScoreFormat,
    TeVariant,
)

LAYOUT_KEYS = ("speaker", "utt", "gender", "label", "n_columns")


def add_convention_flags(parser: argparse.ArgumentParser, allow_auto: bool = True) -> None:
    polarity_choices = [p.value for p in Polarity] + (["auto"] if allow_auto else [])
    parser.add_argument("--polarity", choices=polarity_choices, help="Which score direction means bonafide")
    parser.add_argument("--positive-class", choices=[c.value for c in ClassLabel], help="Label mapped to Y=1")


def add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--layout", help="Protocol columns, e.g. 'speaker=0,utt=1,gender=2,label=3'")
    parser.add_argument("--delimiter", help="Protocol field delimiter (default: any whitespace)")
    parser.add_argument("--score-format", choices=[f.value for f in ScoreFormat], help="Score file flavour")
    parser.add_argument("--allow-orphans", action="store_true", default=None, help="Ignore scores without a trial")


def add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, help="Significance level (default 0.05)")
    parser.add_argument("--eo-variant", choices=[v.value for v in EoVariant])
    parser.add_argument("--te-variant", choices=[v.value for v in TeVariant])
    parser.add_argument("--holm-family", choices=[f.value for f in HolmFamily])
    parser.add_argument(
        "--format",
        dest="formats",
        action="append",
        choices=[f.value for f in ReportFormat],
        help="Output format; repeat for several (default: all)",
    )
    parser.add_argument("--out-dir", help="Report directory (default: $SPOOFAIR_OUT_DIR or ./reports)")
    parser.add_argument("--with-auc", action="store_true", default=None, help="Add AUC columns to the EER table")
    parser.add_argument("--groups", help="Compared group pair, e.g. 'F,M'")
    parser.add_argument("--timestamp", action="store_true", default=None, help="Record generation time in provenance")


def parse_layout(raw: Optional[str], delimiter: Optional[str] = None) -> Optional[Dict[str, Any]]:
    """'utt=1,speaker=0' -> layout mapping; None when neither flag is given."""
    if raw is None and delimiter is None:
        return None
    layout: Dict[str, Any] = {}
    for part in (raw or "").split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in LAYOUT_KEYS:
            raise ConfigError(f"bad layout entry {part!r} (keys: {', '.join(LAYOUT_KEYS)})")
        try:
            layout[key] = int(value)
        except ValueError as exc:
            raise ConfigError(f"layout column {key!r} must be an integer, got {value!r}") from exc
    if delimiter is not None:
        layout["delimiter"] = "\t" if delimiter in ("\\t", "tab") else delimiter
    return layout


def build_layout(args: argparse.Namespace) -> ColumnLayout:
    raw = parse_layout(getattr(args, "layout", None), getattr(args, "delimiter", None))
    if raw is None:
        return ColumnLayout()
    try:
        return ColumnLayout(**raw)
    except ValueError as exc:
        raise ConfigError(f"invalid layout: {exc}") from exc


def parse_groups(raw: Optional[str]) -> Optional[tuple]:
    if raw is None:
        return None
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if len(parts) != 2:
        raise ConfigError(f"--groups needs exactly two comma-separated groups, got {raw!r}")
    return tuple(parts)
