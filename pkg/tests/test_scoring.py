import numpy as np
import pytest
from scipy.stats import norm

from spoofair.core.errors import DegenerateSet, PolarityMismatch
from spoofair.schemas import ClassLabel, GroupClassModel, Polarity, SimConfig, SourceSplit
from spoofair.services import scoring, simgen


def _rows(pos, neg, group="F"):
    rows = [(f"P{i}", group, "spoof", s) for i, s in enumerate(pos)]
    rows += [(f"N{i}", group, "bonafide", s) for i, s in enumerate(neg)]
    return rows


def test_det_sentinels_and_counts(make_set):
    curve = scoring.compute_det(make_set(_rows([3.0, 2.0], [1.0, 0.0])))
    assert list(curve.thresholds) == [-np.inf, 0.0, 1.0, 2.0, 3.0, np.inf]
    assert list(curve.fp_counts) == [2, 2, 1, 0, 0, 0]
    assert list(curve.fn_counts) == [0, 0, 0, 0, 1, 2]
    assert (curve.fpr[0], curve.fnr[0]) == (1.0, 0.0)
    assert (curve.fpr[-1], curve.fnr[-1]) == (0.0, 1.0)


def test_det_rejects_single_class(make_set):
    with pytest.raises(DegenerateSet):
        scoring.compute_det(make_set(_rows([1.0, 2.0], [])))


def test_eer_perfect_separation(make_set):
    eer, threshold = scoring.compute_eer(scoring.compute_det(make_set(_rows([3.0, 2.0], [1.0, 0.0]))))
    assert eer == 0.0
    assert threshold == 2.0


def test_eer_interpolates_between_sweep_points(make_set):
    evaluation = make_set(_rows([1.0, 2.0], [0.0, 1.5, 3.0]))
    eer, threshold = scoring.compute_eer(scoring.compute_det(evaluation))
    assert eer == pytest.approx(0.5)
    assert threshold == pytest.approx(1.75)

    op = scoring.derive_operating_point(evaluation)
    assert op.source_split is SourceSplit.dev
    assert op.crossing_gap == pytest.approx(1 / 6)
    decisions = scoring.apply_threshold(evaluation, op)
    # sorted utt order: N0, N1, N2, P0, P1
    assert list(decisions.predicted_positive) == [False, False, True, False, True]


def test_tie_rule_counts_equal_score_as_positive(make_set):
    evaluation = make_set(_rows([1.0], [0.5]))
    op = scoring.derive_operating_point(evaluation)
    at_score = op.model_copy(update={"threshold": 1.0})
    assert list(scoring.apply_threshold(evaluation, at_score).predicted_positive) == [False, True]


def test_det_matches_naive_recount(make_set):
    rng = np.random.default_rng(3)
    n = 10_000
    scores = np.round(rng.normal(size=n), 2)
    labels = rng.random(n) < 0.3
    rows = [(f"T{i:05d}", "F", "spoof" if lbl else "bonafide", float(s)) for i, (lbl, s) in enumerate(zip(labels, scores))]
    evaluation = make_set(rows)
    curve = scoring.compute_det(evaluation)
    oriented, positive = evaluation.oriented_scores, evaluation.positive
    for t, fp, fn in zip(curve.thresholds, curve.fp_counts, curve.fn_counts):
        decided = oriented >= t
        assert fp == np.count_nonzero(decided & ~positive)
        assert fn == np.count_nonzero(~decided & positive)


@pytest.mark.slow
@pytest.mark.parametrize("separation,expected", [(2.0, norm.cdf(-1.0)), (0.0, 0.5)])
def test_gaussian_eer_oracle(separation, expected):
    config = SimConfig(
        seed=2024,
        models=[
            GroupClassModel(group="F", label=ClassLabel.bonafide, count=100_000, mean=separation / 2, stddev=1.0),
            GroupClassModel(group="F", label=ClassLabel.spoof, count=100_000, mean=-separation / 2, stddev=1.0),
        ],
    )
    evaluation = simgen.draw_evaluation(config)
    eer, _ = scoring.compute_eer(scoring.compute_det(evaluation))
    assert eer == pytest.approx(expected, abs=0.01)


def test_auc_edges(make_set):
    assert scoring.compute_auc(scoring.compute_det(make_set(_rows([2.0, 3.0], [0.0, 1.0])))) == 1.0
    assert scoring.compute_auc(scoring.compute_det(make_set(_rows([0.0, 1.0], [2.0, 3.0])))) == 0.0
    assert scoring.compute_auc(scoring.compute_det(make_set(_rows([1.0], [1.0])))) == 0.5


def test_resolve_polarity(make_set):
    bonafide_high = make_set(_rows([-2.0, -1.0], [1.0, 2.0]), polarity=Polarity.higher_bonafide)
    assert scoring.resolve_polarity(bonafide_high) is Polarity.higher_bonafide
    spoof_high = make_set(_rows([1.0, 2.0], [-2.0, -1.0]), polarity=Polarity.higher_bonafide)
    assert scoring.resolve_polarity(spoof_high) is Polarity.higher_spoof


def test_apply_threshold_checks_convention(make_set):
    evaluation = make_set(_rows([1.0], [0.0]))
    op = scoring.derive_operating_point(evaluation)
    flipped = evaluation.with_convention(polarity=Polarity.higher_bonafide)
    with pytest.raises(PolarityMismatch):
        scoring.apply_threshold(flipped, op)


def test_polarity_flip_with_negated_scores_keeps_decisions(make_set):
    rows = _rows([0.3, -0.2, 1.1], [-0.4, 0.0, 0.2])
    a = make_set(rows, polarity=Polarity.higher_spoof)
    b = make_set([(u, g, lbl, -s) for u, g, lbl, s in rows], polarity=Polarity.higher_bonafide)
    op_a, op_b = scoring.derive_operating_point(a), scoring.derive_operating_point(b)
    assert op_a.threshold == op_b.threshold
    assert op_a.eer_at_derivation == op_b.eer_at_derivation
    assert np.array_equal(scoring.apply_threshold(a, op_a).predicted_positive, scoring.apply_threshold(b, op_b).predicted_positive)
    assert op_b.raw_threshold == -op_b.threshold
    assert "<=" in op_b.raw_rule


def test_eer_unchanged_by_increasing_transform(make_set):
    rows = _rows([0.25, 1.0, -0.5, 2.0], [-1.0, 0.5, 0.0, -2.0, 0.75])
    transformed = [(u, g, lbl, s**3 + s) for u, g, lbl, s in rows]
    eer_a, _ = scoring.compute_eer(scoring.compute_det(make_set(rows)))
    eer_b, _ = scoring.compute_eer(scoring.compute_det(make_set(transformed)))
    assert eer_a == pytest.approx(eer_b, abs=1e-12)


def test_group_performance(make_set):
    rows = _rows([2.0, 1.0], [0.0, 1.5], group="F") + [("M0", "M", "bonafide", 0.1), ("M1", "M", "bonafide", 0.2)]
    perf = scoring.group_performance(make_set(rows), "sys", ["F", "M"], with_auc=True)
    by_group = {p.group: p for p in perf}
    assert list(by_group) == ["F", "M", "All"]
    assert by_group["F"].eer is not None and by_group["F"].auc is not None
    assert by_group["M"].eer is None
    assert by_group["M"].n_trials == 2
    assert by_group["All"].n_trials == 6


def test_det_to_csv(make_set):
    curve = scoring.compute_det(make_set(_rows([1.0], [0.0])))
    lines = scoring.det_to_csv(curve).decode().splitlines()
    assert lines[0] == "threshold,fpr,fnr"
    assert len(lines) == len(curve) + 1
    assert lines[1] == "-inf,1.0,0.0"


def _random_rows(rng, n, decimals=None):
    scores = rng.normal(size=n)
    if decimals is not None:
        scores = np.round(scores, decimals)
    labels = rng.random(n) < 0.4
    labels[0], labels[1] = True, False
    return [(f"T{i:05d}", "F", "spoof" if lbl else "bonafide", float(s)) for i, (lbl, s) in enumerate(zip(labels, scores))]


def test_auc_matches_pair_count(make_set):
    evaluation = make_set(_random_rows(np.random.default_rng(17), 700, decimals=1))
    oriented, positive = evaluation.oriented_scores, evaluation.positive
    pos, neg = oriented[positive][:, None], oriented[~positive][None, :]
    wins = np.count_nonzero(pos > neg) + 0.5 * np.count_nonzero(pos == neg)
    expected = wins / (pos.size * neg.size)
    assert scoring.compute_auc(scoring.compute_det(evaluation)) == pytest.approx(expected, abs=1e-9)


def test_auc_is_half_for_identical_classes():
    config = SimConfig(
        seed=77,
        models=[
            GroupClassModel(group="F", label=ClassLabel.bonafide, count=50_000, mean=0.0, stddev=1.0),
            GroupClassModel(group="F", label=ClassLabel.spoof, count=50_000, mean=0.0, stddev=1.0),
        ],
    )
    auc = scoring.compute_auc(scoring.compute_det(simgen.draw_evaluation(config)))
    assert auc == pytest.approx(0.5, abs=0.01)


@pytest.mark.parametrize("seed", range(5))
def test_det_rates_are_monotone(make_set, seed):
    curve = scoring.compute_det(make_set(_random_rows(np.random.default_rng(seed), 500, decimals=1)))
    assert np.all(np.diff(curve.fnr) >= 0)
    assert np.all(np.diff(curve.fpr) <= 0)


@pytest.mark.parametrize("seed", range(5))
def test_crossing_gap_is_within_one_step(make_set, seed):
    evaluation = make_set(_random_rows(np.random.default_rng(100 + seed), 301))
    op = scoring.derive_operating_point(evaluation)
    n_pos = int(evaluation.positive.sum())
    n_neg = len(evaluation) - n_pos
    assert op.crossing_gap <= 1.0 / min(n_pos, n_neg)


def test_operating_point_unchanged_by_tanh(make_set):
    rows = _random_rows(np.random.default_rng(23), 400, decimals=2)
    a = make_set(rows)
    b = make_set([(u, g, lbl, float(np.tanh(s))) for u, g, lbl, s in rows])
    op_a, op_b = scoring.derive_operating_point(a), scoring.derive_operating_point(b)
    assert op_a.eer_at_derivation == op_b.eer_at_derivation
    assert op_a.crossing_gap == op_b.crossing_gap
    assert np.array_equal(scoring.apply_threshold(a, op_a).predicted_positive, scoring.apply_threshold(b, op_b).predicted_positive)
