"""
Run orchestrator: for every system parse dev and eval, derive the operating point
on dev, measure per-group EER on eval, compute fairness rows on both paths at the
shared threshold, then attach significance across the whole run.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, List, Optional

from ..core.config import settings
from ..core.errors import SpoofairError
from ..repositories import store
from ..schemas import (
    METRIC_ORDER,
    EvaluationSet,
    FairnessRow,
    GroupPerformance,
    MetricName,
    MetricVariants,
    OperatingPoint,
    Polarity,
    Provenance,
    ReportBundle,
    RunConfig,
    SourceSplit,
    SystemPaths,
)
from . import fairness, protocol_io, scoring
from .stats import build_significance

logger = logging.getLogger(__name__)


@dataclass
class SystemResult:
    name: str
    polarity: Polarity
    operating_point: OperatingPoint
    performance: List[GroupPerformance]
    rows: List[FairnessRow]
    cross_rows: List[FairnessRow]


def load_split(paths: SystemPaths, split: SourceSplit, config: RunConfig, polarity: Polarity) -> EvaluationSet:
    protocol_path = paths.dev_protocol if split is SourceSplit.dev else paths.eval_protocol
    scores_path = paths.dev_scores if split is SourceSplit.dev else paths.eval_scores
    trials = protocol_io.parse_protocol(store.read_input(protocol_path), config.layout, name=str(protocol_path))
    scores = protocol_io.read_scores(store.read_input(scores_path), config.score_format, name=str(scores_path))
    return protocol_io.join_trials(trials, scores, polarity, config.positive_class, config.allow_orphans)


def evaluate_system(name: str, paths: SystemPaths, config: RunConfig) -> SystemResult:
    started = time.perf_counter()
    try:
        if config.polarity == "auto":
            candidate = load_split(paths, SourceSplit.dev, config, Polarity.higher_bonafide)
            polarity = scoring.resolve_polarity(candidate)
            dev = candidate.with_convention(polarity=polarity)
        else:
            polarity = Polarity(config.polarity)
            dev = load_split(paths, SourceSplit.dev, config, polarity)
        op = scoring.derive_operating_point(dev, SourceSplit.dev)
        evaluation = load_split(paths, SourceSplit.eval, config, polarity)

        performance = scoring.group_performance(evaluation, name, config.groups, config.with_auc)
        variants = MetricVariants(eo=config.eo_variant, te=config.te_variant)
        rows = fairness.metric_rows(evaluation, op, config.groups, variants, system=name)
        cross = fairness.cross_rows(evaluation, op, config.groups, variants, system=name)
    except SpoofairError as exc:
        raise exc.with_context(name)

    logger.info("System %s evaluated: %d eval trials T=%sms", name, len(evaluation), int((time.perf_counter() - started) * 1000))
    return SystemResult(
        name=name, polarity=polarity, operating_point=op, performance=performance, rows=rows, cross_rows=cross
    )


def _evaluate_all(config: RunConfig) -> List[SystemResult]:
    items = list(config.systems.items())
    if settings.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            futures = [pool.submit(evaluate_system, name, paths, config) for name, paths in items]
            return [f.result() for f in futures]
    return [evaluate_system(name, paths, config) for name, paths in items]


def run(config: RunConfig, generated_at: Optional[datetime] = None) -> ReportBundle:
    started = time.perf_counter()
    results = _evaluate_all(config)

    precursors = [row for r in results for row in r.rows]
    cross_precursors = [row for r in results for row in r.cross_rows]
    rows = build_significance(precursors, config.alpha, config.holm_family)
    cross = build_significance(cross_precursors, config.alpha, config.holm_family)
    fairness.assert_agreement(rows, cross)

    tables: Dict[MetricName, List[FairnessRow]] = {metric: [] for metric in METRIC_ORDER}
    for row in rows:
        tables[row.metric].append(row)

    if generated_at is None and config.timestamp:
        generated_at = datetime.now(timezone.utc)
    provenance = Provenance(
        toolkit=settings.app_name,
        version=settings.app_version,
        positive_class=config.positive_class,
        polarity={r.name: r.polarity for r in results},
        eo_variant=config.eo_variant,
        te_variant=config.te_variant,
        alpha=config.alpha,
        holm_family=config.holm_family,
        groups=config.groups,
        config=config.model_dump(mode="json", exclude={"timestamp"}),
        generated_at=generated_at,
    )
    significant = sum(1 for row in rows if row.significant)
    logger.info(
        "Run complete: %d system(s), %d fairness rows, %d significant T=%sms",
        len(results),
        len(rows),
        significant,
        int((time.perf_counter() - started) * 1000),
    )
    return ReportBundle(
        provenance=provenance,
        systems=[r.name for r in results],
        operating_points={r.name: r.operating_point for r in results},
        performance=[p for r in results for p in r.performance],
        fairness=tables,
    )
