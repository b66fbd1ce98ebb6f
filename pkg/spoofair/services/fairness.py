"""
Group fairness metrics at a fixed operating point.

Two paths compute the same rows. The primary path tallies a confusion matrix per
group and derives each metric from it. The cross-check path estimates every
metric as a conditional frequency over boolean trial masks and never builds a
confusion matrix. Both are expected to agree exactly.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import CrossCheckMismatch, LengthMismatch, MissingGroup
from ..schemas import (
    METRIC_ORDER,
    ConfusionCounts,
    DecisionVector,
    EoVariant,
    EvaluationSet,
    FairnessRow,
    GroupMetricValue,
    HolmFamily,
    MetricName,
    MetricVariants,
    OperatingPoint,
    ProportionSample,
    TeVariant,
)
from .scoring import apply_threshold, check_convention
from .stats import build_significance, metric_to_samples

logger = logging.getLogger(__name__)

GroupPair = Tuple[str, str]

FLOAT_TOLERANCE = 1e-12

Estimator = Callable[[str, np.ndarray], Tuple[GroupMetricValue, Optional[ProportionSample]]]


def confusion(evaluation: EvaluationSet, decisions: DecisionVector) -> ConfusionCounts:
    if len(decisions) != len(evaluation):
        raise LengthMismatch(len(evaluation), len(decisions))
    y = evaluation.positive
    y_hat = decisions.predicted_positive
    tp = int(np.count_nonzero(y & y_hat))
    fp = int(np.count_nonzero(~y & y_hat))
    fn = int(np.count_nonzero(y & ~y_hat))
    tn = len(evaluation) - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _proportion(metric: MetricName, group: str, k: int, n: int) -> GroupMetricValue:
    if n == 0:
        return GroupMetricValue(metric=metric, group=group, numerator=k, denominator=n)
    return GroupMetricValue(metric=metric, group=group, value=k / n, defined=True, numerator=k, denominator=n)


def statistical_parity(cc: ConfusionCounts, group: str = "") -> GroupMetricValue:
    return _proportion(MetricName.SP, group, cc.tp + cc.fp, cc.total)


def equal_opportunity(cc: ConfusionCounts, group: str = "") -> GroupMetricValue:
    return _proportion(MetricName.EOP, group, cc.tp, cc.tp + cc.fn)


def equality_of_odds(cc: ConfusionCounts, group: str = "", variant: EoVariant = EoVariant.fpr) -> GroupMetricValue:
    if variant is EoVariant.fpr:
        return _proportion(MetricName.EO, group, cc.fp, cc.fp + cc.tn)
    if cc.tp + cc.fn == 0 or cc.fp + cc.tn == 0:
        return GroupMetricValue(metric=MetricName.EO, group=group)
    tpr = cc.tp / (cc.tp + cc.fn)
    fpr = cc.fp / (cc.fp + cc.tn)
    return GroupMetricValue(metric=MetricName.EO, group=group, value=(tpr + fpr) / 2.0, defined=True)


def predictive_parity(cc: ConfusionCounts, group: str = "") -> GroupMetricValue:
    return _proportion(MetricName.PP, group, cc.tp, cc.tp + cc.fp)


def treatment_equality(
    cc: ConfusionCounts, group: str = "", variant: TeVariant = TeVariant.count_ratio
) -> GroupMetricValue:
    """fp / fn, or FPR / FNR for the rate variant. A zero denominator is undefined, never inf."""
    if variant is TeVariant.count_ratio:
        if cc.fn == 0:
            return GroupMetricValue(metric=MetricName.TE, group=group)
        return GroupMetricValue(metric=MetricName.TE, group=group, value=cc.fp / cc.fn, defined=True)
    if cc.fn == 0 or cc.fp + cc.tn == 0:
        return GroupMetricValue(metric=MetricName.TE, group=group)
    fpr = cc.fp / (cc.fp + cc.tn)
    fnr = cc.fn / (cc.fn + cc.tp)
    return GroupMetricValue(metric=MetricName.TE, group=group, value=fpr / fnr, defined=True)


def metric_value(metric: MetricName, cc: ConfusionCounts, group: str, variants: MetricVariants) -> GroupMetricValue:
    if metric is MetricName.SP:
        return statistical_parity(cc, group)
    if metric is MetricName.EOP:
        return equal_opportunity(cc, group)
    if metric is MetricName.EO:
        return equality_of_odds(cc, group, variants.eo)
    if metric is MetricName.PP:
        return predictive_parity(cc, group)
    return treatment_equality(cc, group, variants.te)


def _check_pair(evaluation: EvaluationSet, group_pair: GroupPair) -> None:
    present = evaluation.group_names()
    for group in group_pair:
        if group not in present:
            raise MissingGroup(group, present)
    extra = [g for g in present if g not in group_pair]
    if extra:
        logger.warning("Groups outside the compared pair are ignored in fairness rows: %s", extra)


def _diff(a: GroupMetricValue, b: GroupMetricValue) -> Optional[float]:
    if not (a.defined and b.defined):
        return None
    return a.value - b.value


def metric_rows(
    evaluation: EvaluationSet,
    op: OperatingPoint,
    group_pair: GroupPair = ("F", "M"),
    variants: Optional[MetricVariants] = None,
    system: str = "",
) -> List[FairnessRow]:
    """Per-group values, counts and proportion samples for all five metrics, without significance."""
    variants = variants or MetricVariants()
    _check_pair(evaluation, group_pair)
    decisions = apply_threshold(evaluation, op)
    counts: Dict[str, ConfusionCounts] = {}
    for group in group_pair:
        mask = evaluation.groups == group
        counts[group] = confusion(
            evaluation.subset(mask), DecisionVector(predicted_positive=decisions.predicted_positive[mask])
        )
        logger.debug("%s/%s confusion: %s", system, group, counts[group])

    first, second = group_pair
    rows: List[FairnessRow] = []
    for metric in METRIC_ORDER:
        values = {g: metric_value(metric, counts[g], g, variants) for g in group_pair}
        diff = _diff(values[first], values[second])
        samples = None
        if diff is None:
            undefined = [g for g in group_pair if not values[g].defined]
            logger.warning("%s %s undefined for group(s) %s", system, metric.value, undefined)
        else:
            samples = metric_to_samples(metric, counts[first], counts[second], variants.eo)
        rows.append(
            FairnessRow(
                system=system,
                metric=metric,
                variant=variants.for_metric(metric),
                groups=group_pair,
                values=values,
                counts=dict(counts),
                samples=samples,
                diff_f_minus_m=diff,
            )
        )
    return rows


def evaluate_fairness(
    evaluation: EvaluationSet,
    op: OperatingPoint,
    group_pair: GroupPair = ("F", "M"),
    variants: Optional[MetricVariants] = None,
    system: str = "",
    alpha: float = 0.05,
    family: HolmFamily = HolmFamily.per_run,
) -> List[FairnessRow]:
    return build_significance(metric_rows(evaluation, op, group_pair, variants, system), alpha, family)


# Cross-check path ---------------------------------------------------------
def _frequency(event: np.ndarray, given: np.ndarray) -> Tuple[int, int]:
    """(count of event within the conditioning mask, size of the mask)."""
    return int(np.count_nonzero(event & given)), int(np.count_nonzero(given))


def _conditional(metric: MetricName, group: str, k: int, n: int) -> GroupMetricValue:
    if n == 0:
        return GroupMetricValue(metric=metric, group=group, numerator=k, denominator=n)
    return GroupMetricValue(metric=metric, group=group, value=k / n, defined=True, numerator=k, denominator=n)


def cross_rows(
    evaluation: EvaluationSet,
    op: OperatingPoint,
    group_pair: GroupPair = ("F", "M"),
    variants: Optional[MetricVariants] = None,
    system: str = "",
) -> List[FairnessRow]:
    variants = variants or MetricVariants()
    present = evaluation.group_names()
    for group in group_pair:
        if group not in present:
            raise MissingGroup(group, present)

    check_convention(evaluation, op)
    y_hat = evaluation.oriented_scores >= op.threshold
    y = evaluation.positive

    def sample(k: int, n: int) -> Optional[ProportionSample]:
        return ProportionSample(successes=k, trials=n) if n > 0 else None

    def sp(group: str, g: np.ndarray):
        k, n = _frequency(y_hat, g)
        return _conditional(MetricName.SP, group, k, n), sample(k, n)

    def eop(group: str, g: np.ndarray):
        k, n = _frequency(y_hat, g & y)
        return _conditional(MetricName.EOP, group, k, n), sample(k, n)

    def eo(group: str, g: np.ndarray):
        k, n = _frequency(y_hat, g & ~y)
        if variants.eo is EoVariant.fpr:
            return _conditional(MetricName.EO, group, k, n), sample(k, n)
        k_pos, n_pos = _frequency(y_hat, g & y)
        if n == 0 or n_pos == 0:
            return GroupMetricValue(metric=MetricName.EO, group=group), None
        value = (k_pos / n_pos + k / n) / 2.0
        return GroupMetricValue(metric=MetricName.EO, group=group, value=value, defined=True), None

    def pp(group: str, g: np.ndarray):
        k, n = _frequency(y, g & y_hat)
        return _conditional(MetricName.PP, group, k, n), sample(k, n)

    def te(group: str, g: np.ndarray):
        wrong = y_hat != y
        false_pos, errors = _frequency(~y & y_hat, g & wrong)
        false_neg = errors - false_pos
        proportion = sample(false_pos, errors)
        if false_neg == 0:
            return GroupMetricValue(metric=MetricName.TE, group=group), None
        if variants.te is TeVariant.count_ratio:
            return GroupMetricValue(metric=MetricName.TE, group=group, value=false_pos / false_neg, defined=True), proportion
        negatives = int(np.count_nonzero(g & ~y))
        positives = int(np.count_nonzero(g & y))
        if negatives == 0:
            return GroupMetricValue(metric=MetricName.TE, group=group), None
        value = (false_pos / negatives) / (false_neg / positives)
        return GroupMetricValue(metric=MetricName.TE, group=group, value=value, defined=True), proportion

    estimators: Dict[MetricName, Estimator] = {
        MetricName.SP: sp,
        MetricName.EOP: eop,
        MetricName.EO: eo,
        MetricName.PP: pp,
        MetricName.TE: te,
    }

    first, second = group_pair
    masks = {g: evaluation.groups == g for g in group_pair}
    rows: List[FairnessRow] = []
    for metric in METRIC_ORDER:
        estimates = {g: estimators[metric](g, masks[g]) for g in group_pair}
        values = {g: estimates[g][0] for g in group_pair}
        diff = _diff(values[first], values[second])
        a, b = estimates[first][1], estimates[second][1]
        samples = (a, b) if diff is not None and a is not None and b is not None else None
        rows.append(
            FairnessRow(
                system=system,
                metric=metric,
                variant=variants.for_metric(metric),
                groups=group_pair,
                values=values,
                samples=samples,
                diff_f_minus_m=diff,
            )
        )
    return rows


def cross_check(
    evaluation: EvaluationSet,
    op: OperatingPoint,
    group_pair: GroupPair = ("F", "M"),
    variants: Optional[MetricVariants] = None,
    system: str = "",
    alpha: float = 0.05,
    family: HolmFamily = HolmFamily.per_run,
) -> List[FairnessRow]:
    return build_significance(cross_rows(evaluation, op, group_pair, variants, system), alpha, family)


def _close(a: Optional[float], b: Optional[float]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= FLOAT_TOLERANCE


def _compare(left: FairnessRow, right: FairnessRow) -> None:
    metric = left.metric.value
    pair = "-".join(left.groups)
    if left.metric is not right.metric or left.system != right.system:
        raise CrossCheckMismatch(metric, pair, "row order")
    for group in left.groups:
        a, b = left.values[group], right.values.get(group)
        if b is None or a.defined != b.defined:
            raise CrossCheckMismatch(metric, group, "defined")
        if a.numerator != b.numerator or a.denominator != b.denominator:
            raise CrossCheckMismatch(metric, group, "backing counts")
        if not _close(a.value, b.value):
            raise CrossCheckMismatch(metric, group, "value")
    for name in ("diff_f_minus_m", "z", "p_raw", "p_holm"):
        if not _close(getattr(left, name), getattr(right, name)):
            raise CrossCheckMismatch(metric, pair, name)
    if left.significant != right.significant:
        raise CrossCheckMismatch(metric, pair, "significant")


def assert_agreement(primary: Sequence[FairnessRow], secondary: Sequence[FairnessRow]) -> None:
    """Raises CrossCheckMismatch on the first cell where the two paths disagree."""
    if len(primary) != len(secondary):
        raise CrossCheckMismatch("rows", "-", f"{len(primary)} vs {len(secondary)} rows")
    for left, right in zip(primary, secondary):
        try:
            _compare(left, right)
        except CrossCheckMismatch as exc:
            raise exc.with_context(left.system) if left.system else exc
