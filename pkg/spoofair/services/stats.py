"""
Two-proportion z-tests on group disparities and Holm-Bonferroni correction.
"""

import logging
import math
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm
from statsmodels.stats.multitest import multipletests

from ..core.errors import ConfigError, InvalidP
from ..schemas import (
    ConfusionCounts,
    EoVariant,
    FairnessRow,
    HolmFamily,
    HolmOutcome,
    MetricName,
    ProportionSample,
    TestResult,
)

logger = logging.getLogger(__name__)


def two_proportion_z(a: ProportionSample, b: ProportionSample) -> TestResult:
    """Pooled two-sided z-test of H0: p_a == p_b."""
    pooled = (a.successes + b.successes) / (a.trials + b.trials)
    variance = pooled * (1.0 - pooled) * (1.0 / a.trials + 1.0 / b.trials)
    if variance <= 0.0:
        # pooled proportion is 0 or 1, so both samples agree exactly
        return TestResult(z=0.0, p_two_sided=1.0, defined=False, degenerate=True)
    z = (a.proportion - b.proportion) / math.sqrt(variance)
    p = float(min(1.0, 2.0 * norm.sf(abs(z))))
    return TestResult(z=float(z), p_two_sided=p)


def _validated(p_raw: Sequence[float], alpha: float) -> np.ndarray:
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha!r}")
    values = np.asarray(p_raw, dtype=np.float64)
    for value in values:
        if not (0.0 <= value <= 1.0):
            raise InvalidP(float(value))
    return values


def holm_correct(p_raw: Sequence[float], alpha: float = 0.05) -> HolmOutcome:
    """Holm step-down adjusted p-values in input order; reject iff adjusted < alpha."""
    values = _validated(p_raw, alpha)
    if values.size == 0:
        return HolmOutcome(p_adjusted=[], reject=[])
    _, adjusted, _, _ = multipletests(values, alpha=alpha, method="holm")
    adjusted = np.minimum(np.maximum(adjusted, values), 1.0)
    return HolmOutcome(p_adjusted=[float(p) for p in adjusted], reject=[bool(p < alpha) for p in adjusted])


def bonferroni_correct(p_raw: Sequence[float], alpha: float = 0.05) -> HolmOutcome:
    values = _validated(p_raw, alpha)
    if values.size == 0:
        return HolmOutcome(p_adjusted=[], reject=[])
    _, adjusted, _, _ = multipletests(values, alpha=alpha, method="bonferroni")
    return HolmOutcome(p_adjusted=[float(p) for p in adjusted], reject=[bool(p < alpha) for p in adjusted])


def _sample(successes: int, trials: int) -> Optional[ProportionSample]:
    if trials <= 0:
        return None
    return ProportionSample(successes=successes, trials=trials)


def metric_to_samples(
    metric: MetricName,
    a: ConfusionCounts,
    b: ConfusionCounts,
    eo_variant: EoVariant = EoVariant.fpr,
) -> Optional[Tuple[ProportionSample, ProportionSample]]:
    """
    Proportion form of a metric for both groups, or None (not applicable) when the
    metric has no single proportion or either side has an empty denominator.
    TE is tested through fp / (fp + fn), which is order-isomorphic to fp / fn.
    """
    if metric is MetricName.EO and eo_variant is EoVariant.tpr_fpr_mean:
        return None

    def form(cc: ConfusionCounts) -> Optional[ProportionSample]:
        if metric is MetricName.SP:
            return _sample(cc.tp + cc.fp, cc.total)
        if metric is MetricName.EOP:
            return _sample(cc.tp, cc.tp + cc.fn)
        if metric is MetricName.EO:
            return _sample(cc.fp, cc.fp + cc.tn)
        if metric is MetricName.PP:
            return _sample(cc.tp, cc.tp + cc.fp)
        return _sample(cc.fp, cc.fp + cc.fn)

    sa, sb = form(a), form(b)
    if sa is None or sb is None:
        return None
    return sa, sb


def build_significance(
    rows: Sequence[FairnessRow],
    alpha: float = 0.05,
    family: HolmFamily = HolmFamily.per_run,
) -> List[FairnessRow]:
    """
    Attaches z, raw p, Holm-adjusted p and the significance flag to every row that
    carries proportion samples. Rows without samples stay untested.
    """
    tests: Dict[int, TestResult] = {}
    for idx, row in enumerate(rows):
        if row.samples is not None and row.diff_f_minus_m is not None:
            tests[idx] = two_proportion_z(*row.samples)

    families: "OrderedDict[str, List[int]]" = OrderedDict()
    for idx in tests:
        key = "run" if family is HolmFamily.per_run else rows[idx].metric.value
        families.setdefault(key, []).append(idx)

    adjusted: Dict[int, Tuple[float, bool]] = {}
    for key, members in families.items():
        outcome = holm_correct([tests[i].p_two_sided for i in members], alpha)
        for i, p_adj, rej in zip(members, outcome.p_adjusted, outcome.reject):
            adjusted[i] = (p_adj, rej)
        logger.debug("Holm family %s: %d tests, %d rejected", key, len(members), sum(outcome.reject))

    out: List[FairnessRow] = []
    for idx, row in enumerate(rows):
        if idx not in tests:
            out.append(row.model_copy(update={"z": None, "p_raw": None, "p_holm": None, "significant": None}))
            continue
        result = tests[idx]
        p_adj, rej = adjusted[idx]
        out.append(
            row.model_copy(
                update={
                    "z": result.z,
                    "p_raw": result.p_two_sided,
                    "p_holm": p_adj,
                    "significant": rej,
                    "degenerate": result.degenerate,
                }
            )
        )
    return out
