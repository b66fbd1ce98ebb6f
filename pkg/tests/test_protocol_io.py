import io
import logging

import numpy as np
import pytest
from scipy.special import expit, softmax

from spoofair.core.errors import (
    DuplicateUtt,
    EmptyFile,
    MalformedRow,
    MissingScore,
    NonFiniteInput,
    NonFiniteScore,
    OrphanScore,
)
from spoofair.schemas import ClassLabel, ColumnLayout, Polarity, ScoreFormat
from spoofair.services import protocol_io

PROTOCOL = b"""# speaker utt gender label
S01 U0002 F spoof
S02 U0001 m bonafide

S01 U0003 F bonafide
S03 U0004 M spoof
"""

SCORES = b"U0001 0.9\nU0002 -1.5\nU0003 2.25e-1\nU0004 -3\n"


def test_parse_protocol_default_layout():
    trials = protocol_io.parse_protocol(PROTOCOL)
    assert len(trials) == 4
    assert list(trials.utt_ids) == ["U0002", "U0001", "U0003", "U0004"]
    assert list(trials.groups) == ["F", "M", "F", "M"]
    assert list(trials.is_spoof) == [True, False, False, True]
    records = trials.records()
    assert records[1].label is ClassLabel.bonafide
    assert records[1].speaker_id == "S02"


def test_parse_protocol_accepts_stream_bom_and_crlf():
    data = "﻿S1 U1 F bonafide\r\nS2 U2 M spoof\r\n".encode("utf-8")
    trials = protocol_io.parse_protocol(io.BytesIO(data))
    assert list(trials.utt_ids) == ["U1", "U2"]


def test_parse_protocol_custom_layout_and_tokens():
    layout = ColumnLayout(
        utt=0, speaker=1, gender=3, label=2, delimiter="\t", label_tokens={"genuine": "bonafide", "fake": "spoof"}
    )
    data = b"U1\tS1\tGenuine\tf\nU2\tS2\tFAKE\tm\n"
    trials = protocol_io.parse_protocol(data, layout)
    assert list(trials.groups) == ["F", "M"]
    assert list(trials.is_spoof) == [False, True]


def test_parse_protocol_exact_column_count():
    layout = ColumnLayout(label=4, n_columns=5)
    assert layout.min_columns == 5
    with pytest.raises(MalformedRow) as exc:
        protocol_io.parse_protocol(b"S1 U1 F - bonafide\nS1 U2 F bonafide\n", layout)
    assert exc.value.line_no == 2


@pytest.mark.parametrize(
    "data,line_no",
    [
        (b"S1 U1 F bonafide\nS2 U2 F\n", 2),
        (b"S1 U1 F human\n", 1),
        (b"# header\nS1 U1 F maybe\n", 2),
    ],
)
def test_parse_protocol_malformed_rows(data, line_no):
    with pytest.raises(MalformedRow) as exc:
        protocol_io.parse_protocol(data, name="proto.txt")
    assert exc.value.line_no == line_no
    assert "proto.txt" in exc.value.detail


def test_parse_protocol_duplicate_and_empty():
    with pytest.raises(DuplicateUtt):
        protocol_io.parse_protocol(b"S1 U1 F bonafide\nS2 U1 M spoof\n")
    with pytest.raises(EmptyFile):
        protocol_io.parse_protocol(b"# only a comment\n\n")


def test_parse_scores_and_errors():
    table = protocol_io.parse_scores(SCORES)
    assert len(table) == 4
    assert table.scores[2] == pytest.approx(0.225)
    assert len(protocol_io.parse_scores(b"")) == 0

    with pytest.raises(NonFiniteScore):
        protocol_io.parse_scores(b"U1 nan\n")
    with pytest.raises(NonFiniteScore):
        protocol_io.parse_scores(b"U1 -inf\n")
    with pytest.raises(MalformedRow):
        protocol_io.parse_scores(b"U1 abc\n")
    with pytest.raises(MalformedRow):
        protocol_io.parse_scores(b"U1 0.1 0.2\n")
    with pytest.raises(DuplicateUtt):
        protocol_io.parse_scores(b"U1 0.1\nU1 0.2\n")


def test_logits_to_score_matches_softmax():
    assert protocol_io.logits_to_score(0.0, 0.0) == 0.5
    for s, b in [(2.0, -1.0), (-3.5, 4.25), (1000.0, 0.0), (0.0, 1000.0)]:
        expected = softmax(np.array([s, b]))[1]
        assert protocol_io.logits_to_score(s, b) == pytest.approx(expected, abs=1e-15)
    with pytest.raises(NonFiniteInput):
        protocol_io.logits_to_score(float("inf"), 0.0)


def test_parse_logit_scores():
    table = protocol_io.read_scores(b"U1 0 0\nU2 -1000 1000\n", ScoreFormat.logits)
    assert list(table.scores) == pytest.approx([0.5, 1.0])
    with pytest.raises(MalformedRow):
        protocol_io.parse_logit_scores(b"U1 0.5\n")


def test_join_sorts_and_aligns():
    trials = protocol_io.parse_protocol(PROTOCOL)
    scores = protocol_io.parse_scores(SCORES)
    joined = protocol_io.join_trials(trials, scores)
    assert list(joined.utt_ids) == ["U0001", "U0002", "U0003", "U0004"]
    assert list(joined.scores) == pytest.approx([0.9, -1.5, 0.225, -3.0])
    assert list(joined.groups) == ["M", "F", "F", "M"]
    assert joined.summary()["per_cell"] == {"F/bonafide": 1, "F/spoof": 1, "M/bonafide": 1, "M/spoof": 1}


def test_join_missing_and_orphans(caplog):
    trials = protocol_io.parse_protocol(PROTOCOL)
    with pytest.raises(MissingScore) as exc:
        protocol_io.join_trials(trials, protocol_io.parse_scores(b"U0001 0.1\nU0002 0.2\n"))
    assert exc.value.utt_ids == ["U0003", "U0004"]

    extra = protocol_io.parse_scores(SCORES + b"U9999 0.0\n")
    with pytest.raises(OrphanScore):
        protocol_io.join_trials(trials, extra)
    with caplog.at_level(logging.WARNING):
        joined = protocol_io.join_trials(trials, extra, allow_orphans=True)
    assert len(joined) == 4
    assert "orphan" in caplog.text


def test_join_with_no_scores():
    trials = protocol_io.parse_protocol(PROTOCOL)
    with pytest.raises(MissingScore):
        protocol_io.join_trials(trials, protocol_io.parse_scores(b""))


def test_partition_is_disjoint_cover():
    joined = protocol_io.join_trials(protocol_io.parse_protocol(PROTOCOL), protocol_io.parse_scores(SCORES))
    parts = protocol_io.partition_by_group(joined)
    assert sorted(parts.groups) == ["F", "M"]
    ids = sorted(u for p in parts.groups.values() for u in p.utt_ids)
    assert ids == sorted(joined.utt_ids)
    assert parts.all is joined


def test_render_and_reparse_protocol():
    trials = protocol_io.parse_protocol(PROTOCOL)
    again = protocol_io.parse_protocol(protocol_io.render_protocol(trials))
    assert again.records() == trials.records()


def test_render_scores_uses_nine_significant_digits():
    table = protocol_io.parse_scores(b"U1 0.123456789123\nU2 -2\n")
    assert protocol_io.render_scores(table) == b"U1 0.123456789\nU2 -2\n"


def test_canonical_tsv_round_trip():
    joined = protocol_io.join_trials(
        protocol_io.parse_protocol(PROTOCOL),
        protocol_io.parse_scores(SCORES),
        polarity=Polarity.higher_spoof,
    )
    text = protocol_io.export_canonical_tsv(joined)
    assert text.splitlines()[0].decode() == protocol_io.CANONICAL_HEADER
    back = protocol_io.parse_canonical_tsv(text, polarity=Polarity.higher_spoof)
    assert back == joined


def test_canonical_tsv_requires_header():
    with pytest.raises(MalformedRow):
        protocol_io.parse_canonical_tsv(b"U1\tS1\tF\tspoof\t0.5\n")


@pytest.mark.parametrize("text", ["1_0", "infinity", "0x10", "1e", "--1", "1.5f"])
def test_parse_scores_rejects_loose_numbers(text):
    with pytest.raises(MalformedRow) as exc:
        protocol_io.parse_scores(f"U1 0.5\nU2 {text}\n".encode())
    assert exc.value.line_no == 2


def test_parse_scores_accepts_plain_literals():
    table = protocol_io.parse_scores(b"U1 +1.\nU2 -.5\nU3 7E-3\nU4 12\n")
    assert list(table.scores) == [1.0, -0.5, 0.007, 12.0]


def test_invalid_utf8_reports_line():
    with pytest.raises(MalformedRow) as exc:
        protocol_io.parse_protocol(b"S1 U1 F bonafide\nS2 U\xff2 M spoof\n", name="proto.txt")
    assert exc.value.line_no == 2
    assert "proto.txt:2" in str(exc.value)
    with pytest.raises(MalformedRow):
        protocol_io.parse_scores(b"U1 \xfe\n")


def test_logits_to_score_is_symmetric():
    rng = np.random.default_rng(4)
    for a, b in rng.normal(scale=50.0, size=(1000, 2)):
        assert protocol_io.logits_to_score(a, b) + protocol_io.logits_to_score(b, a) == pytest.approx(1.0, abs=1e-12)


def test_logits_to_score_large_logits():
    value = protocol_io.logits_to_score(1000.0, 1001.0)
    assert np.isfinite(value)
    assert value == pytest.approx(expit(1.0), abs=1e-15)


def test_join_ignores_score_file_order():
    rng = np.random.default_rng(12)
    n = 500
    groups = rng.choice(["F", "M"], size=n)
    labels = rng.choice(["spoof", "bonafide"], size=n)
    protocol = "".join(f"S{i % 7} U{i:04d} {g} {lbl}\n" for i, (g, lbl) in enumerate(zip(groups, labels))).encode()
    lines = [f"U{i:04d} {float(s)!r}\n" for i, s in enumerate(rng.normal(size=n))]
    shuffled = [lines[i] for i in rng.permutation(n)]

    trials = protocol_io.parse_protocol(protocol)
    a = protocol_io.join_trials(trials, protocol_io.parse_scores("".join(lines).encode()))
    b = protocol_io.join_trials(trials, protocol_io.parse_scores("".join(shuffled).encode()))
    for column in ("utt_ids", "speaker_ids", "groups", "is_spoof", "scores"):
        assert np.array_equal(getattr(a, column), getattr(b, column)), column
