"""
DET statistics, EER operating point and thresholded decisions.

All sweeps run in oriented-score space (higher means positive class). The tie
rule is fixed: a trial whose oriented score equals the threshold is positive.
"""

import io
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DegenerateSet, PolarityMismatch
from ..schemas import (
    DecisionVector,
    DetCurve,
    EvaluationSet,
    GroupPerformance,
    OperatingPoint,
    Polarity,
    SourceSplit,
)
from .protocol_io import partition_by_group

logger = logging.getLogger(__name__)


def compute_det(evaluation: EvaluationSet) -> DetCurve:
    positive = evaluation.positive
    n_pos = int(positive.sum())
    n_neg = len(evaluation) - n_pos
    if n_pos == 0 or n_neg == 0:
        missing = evaluation.positive_class.value if n_pos == 0 else "non-" + evaluation.positive_class.value
        raise DegenerateSet(f"no {missing} trials among {len(evaluation)}")

    order = np.argsort(evaluation.oriented_scores, kind="mergesort")
    sorted_scores = evaluation.oriented_scores[order]
    sorted_pos = positive[order]

    # first index of every distinct score in the sorted sweep
    starts = np.concatenate(([0], np.flatnonzero(sorted_scores[1:] != sorted_scores[:-1]) + 1))
    pos_below = np.concatenate(([0], np.cumsum(sorted_pos, dtype=np.int64)))[starts]
    neg_below = np.concatenate(([0], np.cumsum(~sorted_pos, dtype=np.int64)))[starts]

    thresholds = np.concatenate(([-np.inf], sorted_scores[starts], [np.inf]))
    fp_counts = np.concatenate(([n_neg], n_neg - neg_below, [0])).astype(np.int64)
    fn_counts = np.concatenate(([0], pos_below, [n_pos])).astype(np.int64)
    for arr in (thresholds, fp_counts, fn_counts):
        arr.flags.writeable = False
    return DetCurve(thresholds=thresholds, fp_counts=fp_counts, fn_counts=fn_counts, n_pos=n_pos, n_neg=n_neg)


def compute_eer(curve: DetCurve) -> Tuple[float, float]:
    """
    EER by linear interpolation between the two sweep points bracketing the
    FPR/FNR crossing. An exact crossing (fpr == fnr at a sweep point) is returned
    as is; with several exact crossings the smallest threshold wins.
    """
    fpr = curve.fpr
    fnr = curve.fnr
    diff = fpr - fnr
    i = int(np.argmax(diff <= 0))
    if diff[i] == 0:
        return float(fpr[i]), float(curve.thresholds[i])

    w = diff[i - 1] / (diff[i - 1] - diff[i])
    eer = fpr[i - 1] + w * (fpr[i] - fpr[i - 1])
    lo, hi = curve.thresholds[i - 1], curve.thresholds[i]
    if np.isinf(hi):
        threshold = np.nextafter(lo, np.inf)
    else:
        threshold = lo + w * (hi - lo)
        if threshold <= lo:
            threshold = np.nextafter(lo, np.inf)
    return float(eer), float(threshold)


def compute_auc(curve: DetCurve) -> float:
    """Trapezoidal area under TPR vs FPR; ties contribute half credit."""
    fpr = curve.fpr
    tpr = 1.0 - curve.fnr
    area = np.sum((fpr[:-1] - fpr[1:]) * (tpr[:-1] + tpr[1:]) / 2.0)
    return float(min(max(area, 0.0), 1.0))


def derive_operating_point(evaluation: EvaluationSet, source_split: SourceSplit = SourceSplit.dev) -> OperatingPoint:
    curve = compute_det(evaluation)
    eer, threshold = compute_eer(curve)
    fpr, fnr = curve.rates_at(threshold)
    op = OperatingPoint(
        threshold=threshold,
        eer_at_derivation=eer,
        crossing_gap=abs(fpr - fnr),
        source_split=source_split,
        polarity=evaluation.polarity,
        positive_class=evaluation.positive_class,
    )
    logger.info(
        "Operating point on %s: EER=%.4f threshold=%r gap=%.3g (n_pos=%d n_neg=%d)",
        source_split.value,
        eer,
        threshold,
        op.crossing_gap,
        curve.n_pos,
        curve.n_neg,
    )
    return op


def check_convention(evaluation: EvaluationSet, op: OperatingPoint) -> None:
    """Raises PolarityMismatch unless the operating point was derived under the set's convention."""
    if op.polarity is not evaluation.polarity or op.positive_class is not evaluation.positive_class:
        raise PolarityMismatch(
            f"{evaluation.polarity.value}/{evaluation.positive_class.value}",
            f"{op.polarity.value}/{op.positive_class.value}",
        )


def apply_threshold(evaluation: EvaluationSet, op: OperatingPoint) -> DecisionVector:
    check_convention(evaluation, op)
    predicted = evaluation.oriented_scores >= op.threshold
    predicted.flags.writeable = False
    return DecisionVector(predicted_positive=predicted)


def resolve_polarity(dev: EvaluationSet) -> Polarity:
    """Orientation whose dev-set AUC is at least 0.5; an exact 0.5 keeps higher-bonafide."""
    candidate = dev.with_convention(polarity=Polarity.higher_bonafide)
    auc = compute_auc(compute_det(candidate))
    chosen = Polarity.higher_bonafide if auc >= 0.5 else Polarity.higher_spoof
    logger.info("Auto polarity: AUC(higher-bonafide)=%.4f -> %s", auc, chosen.value)
    return chosen


def group_performance(
    evaluation: EvaluationSet,
    system: str,
    groups: Sequence[str],
    with_auc: bool = False,
    all_label: str = "All",
) -> List[GroupPerformance]:
    """EER (and AUC) per requested group plus the combined set; degenerate cells stay empty."""
    parts = partition_by_group(evaluation)
    cells: List[Tuple[str, Optional[EvaluationSet]]] = [(g, parts.groups.get(g)) for g in groups]
    cells.append((all_label, parts.all))
    rows: List[GroupPerformance] = []
    for name, subset in cells:
        if subset is None:
            rows.append(GroupPerformance(system=system, group=name, n_trials=0))
            continue
        try:
            curve = compute_det(subset)
        except DegenerateSet as exc:
            logger.warning("%s/%s: EER undefined (%s)", system, name, exc.detail)
            rows.append(GroupPerformance(system=system, group=name, n_trials=len(subset)))
            continue
        eer, threshold = compute_eer(curve)
        rows.append(
            GroupPerformance(
                system=system,
                group=name,
                n_trials=len(subset),
                eer=eer,
                eer_threshold=threshold,
                auc=compute_auc(curve) if with_auc else None,
            )
        )
    return rows


def det_to_csv(curve: DetCurve) -> bytes:
    out = io.StringIO()
    out.write("threshold,fpr,fnr\n")
    for t, fp, fn in zip(curve.thresholds, curve.fpr, curve.fnr):
        out.write(f"{float(t)!r},{float(fp)!r},{float(fn)!r}\n")
    return out.getvalue().encode("utf-8")
