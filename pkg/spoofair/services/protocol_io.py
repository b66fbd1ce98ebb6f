"""
Protocol and score file ingestion: parse, validate, join by utt_id and partition
by group. Rendering helpers produce the canonical text formats read back here.
"""

import io
import logging
import math
import re
from typing import IO, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ..core.errors import (
    DuplicateUtt,
    EmptyFile,
    MalformedRow,
    MissingScore,
    NonFiniteInput,
    NonFiniteScore,
    OrphanScore,
)
from ..schemas import (
    ClassLabel,
    ColumnLayout,
    EvaluationSet,
    GroupPartition,
    Polarity,
    ScoreFormat,
    ScoreTable,
    TrialTable,
    normalize_group,
)

logger = logging.getLogger(__name__)

Source = Union[bytes, bytearray, IO[bytes]]

CANONICAL_HEADER = "utt_id\tspeaker_id\tgender\tlabel\tscore"


def _lines(source: Source, name: Optional[str] = None) -> Iterator[Tuple[int, str]]:
    """Yields (line_no, stripped line) for non-empty, non-comment lines."""
    data = bytes(source if isinstance(source, (bytes, bytearray)) else source.read())
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        line_no = data.count(b"\n", 0, exc.start) + 1
        raise MalformedRow(line_no, f"invalid UTF-8 at byte {exc.start}", name) from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line


def _split(line: str, delimiter: Optional[str]) -> List[str]:
    if delimiter is None:
        return line.split()
    return [field.strip() for field in line.split(delimiter)]


# Protocol -----------------------------------------------------------------
def parse_protocol(source: Source, layout: Optional[ColumnLayout] = None, name: Optional[str] = None) -> TrialTable:
    layout = layout or ColumnLayout()
    tokens = layout.label_tokens
    exact = layout.n_columns
    need = layout.min_columns

    utt_ids: List[str] = []
    speakers: List[str] = []
    groups: List[str] = []
    spoof: List[bool] = []
    seen: Dict[str, int] = {}
    group_cache: Dict[str, str] = {}

    for line_no, line in _lines(source, name):
        fields = _split(line, layout.delimiter)
        if (exact is not None and len(fields) != exact) or len(fields) < need:
            raise MalformedRow(line_no, f"expected {exact or need} columns, got {len(fields)}", name)
        utt = fields[layout.utt]
        spk = fields[layout.speaker]
        if not utt or not spk:
            raise MalformedRow(line_no, "empty utterance or speaker id", name)
        label = tokens.get(fields[layout.label].lower())
        if label is None:
            raise MalformedRow(line_no, f"unknown label token {fields[layout.label]!r}", name)
        raw_group = fields[layout.gender]
        group = group_cache.get(raw_group)
        if group is None:
            try:
                group = normalize_group(raw_group)
            except ValueError as exc:
                raise MalformedRow(line_no, str(exc), name) from exc
            group_cache[raw_group] = group
        if utt in seen:
            raise DuplicateUtt(utt)
        seen[utt] = line_no
        utt_ids.append(utt)
        speakers.append(spk)
        groups.append(group)
        spoof.append(label is ClassLabel.spoof)

    if not utt_ids:
        raise EmptyFile(name)
    table = TrialTable.from_columns(utt_ids, speakers, groups, spoof)
    logger.info("Parsed protocol %s: %d trials, groups=%s", name or "<stream>", len(table), sorted(group_cache.values()))
    return table


def render_protocol(trials: TrialTable) -> bytes:
    """Default-layout protocol text (``speaker utt gender label``), LF endings."""
    out = io.StringIO()
    for utt, spk, grp, sp in zip(trials.utt_ids, trials.speaker_ids, trials.groups, trials.is_spoof):
        out.write(f"{spk} {utt} {grp} {'spoof' if sp else 'bonafide'}\n")
    return out.getvalue().encode("utf-8")


# Scores -------------------------------------------------------------------
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:nan|inf)", re.IGNORECASE)


def _parse_float(text: str, line_no: int, name: Optional[str]) -> float:
    """Plain decimal or scientific literals; `nan` and `inf` pass through to the finiteness checks."""
    if not _NUMBER.fullmatch(text):
        raise MalformedRow(line_no, f"not a number: {text!r}", name)
    return float(text)


def parse_scores(source: Source, name: Optional[str] = None) -> ScoreTable:
    utt_ids: List[str] = []
    scores: List[float] = []
    seen = set()
    for line_no, line in _lines(source, name):
        fields = line.split()
        if len(fields) != 2:
            raise MalformedRow(line_no, f"expected 'utt_id score', got {len(fields)} fields", name)
        utt, text = fields
        value = _parse_float(text, line_no, name)
        if not math.isfinite(value):
            raise NonFiniteScore(utt)
        if utt in seen:
            raise DuplicateUtt(utt)
        seen.add(utt)
        utt_ids.append(utt)
        scores.append(value)
    table = ScoreTable.from_columns(utt_ids, scores)
    logger.info("Parsed scores %s: %d records", name or "<stream>", len(table))
    return table


def logits_to_score(logit_spoof: float, logit_bonafide: float) -> float:
    """Softmax posterior of the bonafide class, evaluated after subtracting the max logit."""
    if not (math.isfinite(logit_spoof) and math.isfinite(logit_bonafide)):
        raise NonFiniteInput(f"logits ({logit_spoof!r}, {logit_bonafide!r})")
    top = max(logit_spoof, logit_bonafide)
    e_spoof = math.exp(logit_spoof - top)
    e_bona = math.exp(logit_bonafide - top)
    return e_bona / (e_spoof + e_bona)


def logits_to_scores(logit_spoof: np.ndarray, logit_bonafide: np.ndarray) -> np.ndarray:
    """Vectorised ``logits_to_score``."""
    s = np.asarray(logit_spoof, dtype=np.float64)
    b = np.asarray(logit_bonafide, dtype=np.float64)
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(b))):
        raise NonFiniteInput("logit arrays")
    top = np.maximum(s, b)
    e_spoof = np.exp(s - top)
    e_bona = np.exp(b - top)
    return e_bona / (e_spoof + e_bona)


def parse_logit_scores(source: Source, name: Optional[str] = None) -> ScoreTable:
    """``utt_id logit_spoof logit_bonafide`` rows, converted to bonafide posteriors."""
    utt_ids: List[str] = []
    logits: List[Tuple[float, float]] = []
    seen = set()
    for line_no, line in _lines(source, name):
        fields = line.split()
        if len(fields) != 3:
            raise MalformedRow(line_no, f"expected 'utt_id logit_spoof logit_bonafide', got {len(fields)} fields", name)
        utt = fields[0]
        pair = (_parse_float(fields[1], line_no, name), _parse_float(fields[2], line_no, name))
        if not (math.isfinite(pair[0]) and math.isfinite(pair[1])):
            raise NonFiniteInput(f"logits for {utt!r}")
        if utt in seen:
            raise DuplicateUtt(utt)
        seen.add(utt)
        utt_ids.append(utt)
        logits.append(pair)
    arr = np.array(logits, dtype=np.float64).reshape(-1, 2)
    table = ScoreTable.from_columns(utt_ids, logits_to_scores(arr[:, 0], arr[:, 1]))
    logger.info("Parsed logit scores %s: %d records", name or "<stream>", len(table))
    return table


def read_scores(source: Source, score_format: ScoreFormat = ScoreFormat.score, name: Optional[str] = None) -> ScoreTable:
    if score_format is ScoreFormat.logits:
        return parse_logit_scores(source, name)
    return parse_scores(source, name)


def format_score(value: float) -> str:
    return f"{value:.9g}"


def render_scores(scores: ScoreTable) -> bytes:
    out = io.StringIO()
    for utt, value in zip(scores.utt_ids, scores.scores):
        out.write(f"{utt} {format_score(float(value))}\n")
    return out.getvalue().encode("utf-8")


# Join ---------------------------------------------------------------------
def join_trials(
    trials: TrialTable,
    scores: ScoreTable,
    polarity: Polarity = Polarity.higher_bonafide,
    positive_class: ClassLabel = ClassLabel.spoof,
    allow_orphans: bool = False,
) -> EvaluationSet:
    """Matches every trial to exactly one score; the result is sorted by utt_id."""
    order = np.argsort(trials.utt_ids, kind="stable")
    trial_ids = trials.utt_ids[order]

    s_order = np.argsort(scores.utt_ids, kind="stable")
    score_ids = scores.utt_ids[s_order]
    pos = np.searchsorted(score_ids, trial_ids) if len(score_ids) else np.zeros(len(trial_ids), dtype=np.intp)
    clipped = np.minimum(pos, max(len(score_ids) - 1, 0))
    matched = (pos < len(score_ids)) & (score_ids[clipped] == trial_ids) if len(score_ids) else np.zeros(len(trial_ids), dtype=bool)
    if not np.all(matched):
        raise MissingScore(str(u) for u in trial_ids[~matched])

    orphan_mask = ~np.isin(score_ids, trial_ids)
    if np.any(orphan_mask):
        orphans = [str(u) for u in score_ids[orphan_mask]]
        if not allow_orphans:
            raise OrphanScore(orphans)
        logger.warning("Ignoring %d orphan score(s) without a trial (first: %s)", len(orphans), orphans[0])

    joined = EvaluationSet(
        utt_ids=trial_ids,
        speaker_ids=trials.speaker_ids[order],
        groups=trials.groups[order],
        is_spoof=trials.is_spoof[order],
        scores=scores.scores[s_order][clipped],
        polarity=polarity,
        positive_class=positive_class,
    )
    for arr in (joined.utt_ids, joined.speaker_ids, joined.groups, joined.is_spoof, joined.scores):
        arr.flags.writeable = False
    summary = joined.summary()
    logger.info(
        "Joined %d trials: per_group=%s per_class=%s", summary["n_total"], summary["per_group"], summary["per_class"]
    )
    return joined


def partition_by_group(evaluation: EvaluationSet) -> GroupPartition:
    """Disjoint per-group subsets (sorted by group token) plus the unpartitioned set."""
    parts = {g: evaluation.subset(evaluation.groups == g) for g in evaluation.group_names()}
    return GroupPartition(groups=parts, all=evaluation)


# Canonical TSV ------------------------------------------------------------
def export_canonical_tsv(evaluation: EvaluationSet) -> bytes:
    out = io.StringIO()
    out.write(CANONICAL_HEADER + "\n")
    for (trial, score) in evaluation.records():
        out.write(f"{trial.utt_id}\t{trial.speaker_id}\t{trial.group}\t{trial.label.value}\t{score!r}\n")
    return out.getvalue().encode("utf-8")


def parse_canonical_tsv(
    source: Source,
    polarity: Polarity = Polarity.higher_bonafide,
    positive_class: ClassLabel = ClassLabel.spoof,
    name: Optional[str] = None,
) -> EvaluationSet:
    lines = _lines(source, name)
    first = next(lines, None)
    if first is None:
        raise EmptyFile(name)
    if first[1] != CANONICAL_HEADER:
        raise MalformedRow(first[0], "missing canonical TSV header", name)

    tokens = ColumnLayout().label_tokens
    utt_ids: List[str] = []
    speakers: List[str] = []
    groups: List[str] = []
    spoof: List[bool] = []
    values: List[float] = []
    seen = set()
    for line_no, line in lines:
        fields = line.split("\t")
        if len(fields) != 5:
            raise MalformedRow(line_no, f"expected 5 tab-separated columns, got {len(fields)}", name)
        utt, spk, raw_group, raw_label, raw_score = fields
        label = tokens.get(raw_label.lower())
        if label is None:
            raise MalformedRow(line_no, f"unknown label token {raw_label!r}", name)
        try:
            group = normalize_group(raw_group)
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc), name) from exc
        value = _parse_float(raw_score, line_no, name)
        if not math.isfinite(value):
            raise NonFiniteScore(utt)
        if utt in seen:
            raise DuplicateUtt(utt)
        seen.add(utt)
        utt_ids.append(utt)
        speakers.append(spk)
        groups.append(group)
        spoof.append(label is ClassLabel.spoof)
        values.append(value)
    if not utt_ids:
        raise EmptyFile(name)
    trials = TrialTable.from_columns(utt_ids, speakers, groups, spoof)
    return join_trials(trials, ScoreTable.from_columns(utt_ids, values), polarity, positive_class)
