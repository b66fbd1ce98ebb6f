"""
Deterministic synthetic protocol/score generation with Gaussian per-(group, class)
score models, plus analytic and brute-force oracles.

Generator: numpy Philox (4x64, 10 rounds) keyed by (seed, cell index), one stream
per cell. Normal variates come from a fixed Box-Muller transform of the stream's
uniform doubles: r = sqrt(-2 ln(1 - u1)), theta = 2 pi u2, emitting r cos(theta)
then r sin(theta) per pair. Scores are rendered with 9 significant digits.
"""

import io
import json
import logging
import math
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from ..core.config import settings
from ..core.errors import CapExceeded, ConfigError, DegenerateSet, MissingScore, TooLarge
from ..schemas import (
    CellExpectation,
    ClassLabel,
    EoVariant,
    EvaluationSet,
    GroupClassModel,
    MetricName,
    MetricVariants,
    Polarity,
    ScoreRecord,
    SimArtifacts,
    SimConfig,
    TeVariant,
    TrialRecord,
    orientation_sign,
)
from .protocol_io import format_score

logger = logging.getLogger(__name__)

PRNG_NAME = "philox4x64"
TRANSFORM_NAME = "box-muller"
SCENARIOS = ("symmetric", "biased")


def _check_caps(config: SimConfig) -> None:
    for model in config.models:
        if model.count > settings.sim_count_cap:
            raise CapExceeded(model.count, settings.sim_count_cap)


def _cell_stream(seed: int, cell_index: int) -> np.random.Generator:
    key = np.array([seed, cell_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normals(gen: np.random.Generator, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u = gen.random(2 * pairs).reshape(pairs, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    out = np.empty((pairs, 2), dtype=np.float64)
    out[:, 0] = r * np.cos(theta)
    out[:, 1] = r * np.sin(theta)
    return out.reshape(-1)[:count]


def draw_cells(config: SimConfig) -> List[Tuple[GroupClassModel, np.ndarray]]:
    """Raw float64 scores per cell, in config order."""
    _check_caps(config)
    cells = []
    for index, model in enumerate(config.models):
        z = standard_normals(_cell_stream(config.seed, index), model.count)
        cells.append((model, model.mean + model.stddev * z))
    return cells


def _ids(config: SimConfig) -> List[Tuple[GroupClassModel, List[str], List[str]]]:
    out = []
    offset = 0
    for model in config.models:
        utts = [f"{config.id_prefix}{offset + i:08d}" for i in range(model.count)]
        speakers = [f"{config.id_prefix}S{model.group}{i % config.speakers_per_group:03d}" for i in range(model.count)]
        out.append((model, utts, speakers))
        offset += model.count
    return out


def draw_evaluation(
    config: SimConfig,
    polarity: Polarity = Polarity.higher_bonafide,
    positive_class: ClassLabel = ClassLabel.spoof,
) -> EvaluationSet:
    """Array-level equivalent of ``generate`` followed by parsing, skipping the text round trip."""
    cells = draw_cells(config)
    utts: List[str] = []
    speakers: List[str] = []
    groups: List[str] = []
    labels: List[ClassLabel] = []
    for model, cell_utts, cell_speakers in _ids(config):
        utts.extend(cell_utts)
        speakers.extend(cell_speakers)
        groups.extend([model.group] * model.count)
        labels.extend([model.label] * model.count)
    scores = np.concatenate([s for _, s in cells]) if cells else np.empty(0)
    return EvaluationSet.from_arrays(utts, groups, labels, scores, polarity, positive_class, speaker_ids=speakers)


def generate(config: SimConfig) -> SimArtifacts:
    """Protocol text, score text and manifest; byte-identical for identical configs."""
    cells = draw_cells(config)
    protocol = io.StringIO()
    scores = io.StringIO()
    manifest = io.StringIO()
    manifest.write(f"seed={config.seed}\n")
    manifest.write(f"prng={PRNG_NAME}\n")
    manifest.write(f"transform={TRANSFORM_NAME}\n")
    manifest.write(f"id_prefix={config.id_prefix}\n")
    manifest.write(f"cells={len(config.models)}\n")

    total = 0
    for index, ((model, utts, speakers), (_, values)) in enumerate(zip(_ids(config), cells)):
        label = model.label.value
        rendered = [format_score(float(v)) for v in values]
        for utt, spk, text in zip(utts, speakers, rendered):
            protocol.write(f"{spk} {utt} {model.group} {label}\n")
            scores.write(f"{utt} {text}\n")
        cell_sum = math.fsum(float(t) for t in rendered)
        for key, value in (
            ("group", model.group),
            ("label", label),
            ("count", model.count),
            ("mean", repr(model.mean)),
            ("stddev", repr(model.stddev)),
            ("sum", repr(cell_sum)),
        ):
            manifest.write(f"cell.{index}.{key}={value}\n")
        total += model.count

    logger.info("Generated %d trials over %d cells (seed=%d)", total, len(config.models), config.seed)
    return SimArtifacts(
        protocol=protocol.getvalue().encode("utf-8"),
        scores=scores.getvalue().encode("utf-8"),
        manifest=manifest.getvalue().encode("utf-8"),
        n_trials=total,
    )


def parse_manifest(data: bytes) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for line in data.decode("utf-8").splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


# Analytic oracles ---------------------------------------------------------
def _p_positive(model: GroupClassModel, threshold: float, sign: float) -> float:
    # oriented = sign * score >= threshold
    if sign > 0:
        return float(norm.sf(threshold, loc=model.mean, scale=model.stddev))
    return float(norm.cdf(-threshold, loc=model.mean, scale=model.stddev))


def expected_rates(
    config: SimConfig,
    threshold: float,
    polarity: Polarity = Polarity.higher_bonafide,
    positive_class: ClassLabel = ClassLabel.spoof,
) -> List[CellExpectation]:
    """Exact Gaussian decision probabilities per cell at an oriented-space threshold."""
    sign = orientation_sign(polarity, positive_class)
    rows = []
    for model in config.models:
        p = _p_positive(model, threshold, sign)
        if model.label is positive_class:
            rows.append(
                CellExpectation(
                    group=model.group,
                    label=model.label,
                    count=model.count,
                    p_decide_positive=p,
                    fnr=1.0 - p,
                    tp=p * model.count,
                    fn=(1.0 - p) * model.count,
                )
            )
        else:
            rows.append(
                CellExpectation(
                    group=model.group,
                    label=model.label,
                    count=model.count,
                    p_decide_positive=p,
                    fpr=p,
                    fp=p * model.count,
                    tn=(1.0 - p) * model.count,
                )
            )
    return rows


def analytic_eer(
    config: SimConfig,
    polarity: Polarity = Polarity.higher_bonafide,
    positive_class: ClassLabel = ClassLabel.spoof,
    group: Optional[str] = None,
) -> Tuple[float, float]:
    """(EER, oriented threshold) of the count-weighted mixture, optionally restricted to one group."""
    sign = orientation_sign(polarity, positive_class)
    models = [m for m in config.models if m.count > 0 and (group is None or m.group == group)]
    positives = [m for m in models if m.label is positive_class]
    negatives = [m for m in models if m.label is not positive_class]
    if not positives or not negatives:
        raise DegenerateSet("analytic EER needs both classes with non-zero counts")
    n_pos = sum(m.count for m in positives)
    n_neg = sum(m.count for m in negatives)

    def gap(t: float) -> float:
        fpr = sum(m.count * _p_positive(m, t, sign) for m in negatives) / n_neg
        fnr = sum(m.count * (1.0 - _p_positive(m, t, sign)) for m in positives) / n_pos
        return fpr - fnr

    spread = 50.0 * max(m.stddev for m in models)
    lo = min(sign * m.mean for m in models) - spread
    hi = max(sign * m.mean for m in models) + spread
    t = brentq(gap, lo, hi, xtol=1e-12)
    eer = sum(m.count * _p_positive(m, t, sign) for m in negatives) / n_neg
    return float(eer), float(t)


# Brute-force oracle -------------------------------------------------------
BruteForceResult = Dict[str, Dict[MetricName, Optional[Fraction]]]


def _ratio(k: int, n: int) -> Optional[Fraction]:
    return Fraction(k, n) if n else None


def brute_force_fairness(
    trials: Sequence[TrialRecord],
    scores: Union[Mapping[str, float], Sequence[ScoreRecord]],
    threshold: float,
    positive_class: ClassLabel = ClassLabel.spoof,
    polarity: Polarity = Polarity.higher_bonafide,
    variants: Optional[MetricVariants] = None,
) -> BruteForceResult:
    """
    Per-trial tally with exact rationals, written independently of the fairness
    service. ``threshold`` is in oriented space. Undefined cells are None.
    """
    variants = variants or MetricVariants()
    if len(trials) > settings.brute_force_cap:
        raise TooLarge(len(trials), settings.brute_force_cap)
    lookup = dict(scores) if isinstance(scores, Mapping) else {r.utt_id: r.score for r in scores}
    missing = [t.utt_id for t in trials if t.utt_id not in lookup]
    if missing:
        raise MissingScore(missing)

    higher_means_positive = (polarity is Polarity.higher_spoof) == (positive_class is ClassLabel.spoof)
    tally: Dict[str, Dict[str, int]] = {}
    for trial in trials:
        score = lookup[trial.utt_id]
        decided = (score if higher_means_positive else -score) >= threshold
        actual = trial.label == positive_class
        cell = tally.setdefault(trial.group, {"tp": 0, "fp": 0, "tn": 0, "fn": 0})
        if actual and decided:
            cell["tp"] += 1
        elif actual:
            cell["fn"] += 1
        elif decided:
            cell["fp"] += 1
        else:
            cell["tn"] += 1

    out: BruteForceResult = {}
    for group in sorted(tally):
        c = tally[group]
        tpr = _ratio(c["tp"], c["tp"] + c["fn"])
        fpr = _ratio(c["fp"], c["fp"] + c["tn"])
        if variants.eo is EoVariant.fpr:
            eo = fpr
        else:
            eo = (tpr + fpr) / 2 if tpr is not None and fpr is not None else None
        if variants.te is TeVariant.count_ratio:
            te = _ratio(c["fp"], c["fn"])
        else:
            fnr = _ratio(c["fn"], c["fn"] + c["tp"])
            te = fpr / fnr if fpr is not None and fnr else None
        out[group] = {
            MetricName.SP: _ratio(c["tp"] + c["fp"], sum(c.values())),
            MetricName.EOP: tpr,
            MetricName.EO: eo,
            MetricName.PP: _ratio(c["tp"], c["tp"] + c["fp"]),
            MetricName.TE: te,
        }
    return out


# Scenarios ----------------------------------------------------------------
def derive_seed(seed: int, *indices: int) -> int:
    """Child seed for a (system, split) position, order-sensitive in the indices; no indices keeps the seed."""
    if not indices:
        return seed
    state = np.random.SeedSequence(seed, spawn_key=indices).generate_state(1, dtype=np.uint64)
    return int(state[0])


def scenario_config(
    scenario: str,
    n_per_cell: int,
    seed: int,
    shift: float = 0.5,
    groups: Tuple[str, str] = ("F", "M"),
    separation: float = 2.0,
    id_prefix: str = "U",
) -> SimConfig:
    """
    Two groups, two classes, unit variance, bonafide mean above spoof mean by
    ``separation`` (higher-bonafide scores). ``biased`` moves the first group's
    spoof cell ``shift`` standard deviations further toward the spoof side.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r} (expected one of {', '.join(SCENARIOS)})")
    half = separation / 2.0
    models = []
    for g in groups:
        spoof_mean = -half
        if scenario == "biased" and g == groups[0]:
            spoof_mean -= shift
        models.append(GroupClassModel(group=g, label=ClassLabel.bonafide, count=n_per_cell, mean=half, stddev=1.0))
        models.append(GroupClassModel(group=g, label=ClassLabel.spoof, count=n_per_cell, mean=spoof_mean, stddev=1.0))
    return SimConfig(models=models, seed=seed, id_prefix=id_prefix)


def _toml_str(value: str) -> str:
    return json.dumps(value)


def render_run_toml(systems: Sequence[str], files: Mapping[str, Mapping[str, str]], groups: Tuple[str, str]) -> bytes:
    out = io.StringIO()
    out.write("# generated by spoofair simulate\n")
    out.write('polarity = "higher-bonafide"\n')
    out.write('positive_class = "spoof"\n')
    out.write(f"groups = [{_toml_str(groups[0])}, {_toml_str(groups[1])}]\n")
    for name in systems:
        out.write(f"\n[systems.{_toml_str(name)}]\n")
        for key in ("dev_protocol", "dev_scores", "eval_protocol", "eval_scores"):
            out.write(f"{key} = {_toml_str(files[name][key])}\n")
    return out.getvalue().encode("utf-8")


def scenario_files(
    scenario: str,
    n_per_cell: int,
    seed: int,
    shift: float = 0.5,
    systems: int = 1,
    groups: Tuple[str, str] = ("F", "M"),
    dev_per_cell: Optional[int] = None,
) -> Dict[str, bytes]:
    """
    File name -> bytes for a complete simulated run: shared dev/eval protocols,
    per-system score files and manifests, and ``run.toml`` wiring them together.
    """
    dev_n = dev_per_cell if dev_per_cell is not None else max(n_per_cell // 10, 2)
    names = [f"sys{i + 1}" for i in range(systems)]
    out: Dict[str, bytes] = {}
    wiring: Dict[str, Dict[str, str]] = {name: {} for name in names}
    for split_index, (split, n, prefix) in enumerate((("dev", dev_n, "D"), ("eval", n_per_cell, "E"))):
        for sys_index, name in enumerate(names):
            config = scenario_config(
                scenario, n, derive_seed(seed, sys_index, split_index), shift, groups, id_prefix=prefix
            )
            artifacts = generate(config)
            protocol_name = f"protocol_{split}.txt"
            out.setdefault(protocol_name, artifacts.protocol)
            out[f"scores_{name}_{split}.txt"] = artifacts.scores
            out[f"manifest_{name}_{split}.txt"] = artifacts.manifest
            wiring[name][f"{split}_protocol"] = protocol_name
            wiring[name][f"{split}_scores"] = f"scores_{name}_{split}.txt"
    out["run.toml"] = render_run_toml(names, wiring, groups)
    logger.info("Scenario %s: %d system(s), %d eval trials per cell, %d dev", scenario, systems, n_per_cell, dev_n)
    return out
