from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pytest

from spoofair.schemas import (
    ClassLabel,
    EvaluationSet,
    GroupClassModel,
    OperatingPoint,
    Polarity,
    SimConfig,
    SourceSplit,
)

Row = Tuple[str, str, str, float]


@pytest.fixture
def make_set() -> Callable[..., EvaluationSet]:
    """Rows of (utt_id, group, label, score) -> EvaluationSet."""

    def _make(
        rows: Sequence[Row],
        polarity: Polarity = Polarity.higher_spoof,
        positive_class: ClassLabel = ClassLabel.spoof,
    ) -> EvaluationSet:
        utts, groups, labels, scores = zip(*rows)
        return EvaluationSet.from_arrays(utts, groups, labels, scores, polarity, positive_class)

    return _make


@pytest.fixture
def make_op() -> Callable[..., OperatingPoint]:
    def _make(threshold: float, evaluation: Optional[EvaluationSet] = None) -> OperatingPoint:
        return OperatingPoint(
            threshold=threshold,
            eer_at_derivation=0.0,
            crossing_gap=0.0,
            source_split=SourceSplit.custom,
            polarity=evaluation.polarity if evaluation is not None else Polarity.higher_spoof,
            positive_class=evaluation.positive_class if evaluation is not None else ClassLabel.spoof,
        )

    return _make


@pytest.fixture
def random_set(make_set) -> Callable[[np.random.Generator, int], EvaluationSet]:
    """Small random two-group set with tied scores; both groups always present."""

    def _make(rng: np.random.Generator, n: int) -> EvaluationSet:
        groups = rng.choice(["F", "M"], size=n)
        groups[0], groups[1] = "F", "M"
        labels = rng.choice(["bonafide", "spoof"], size=n)
        scores = np.round(rng.normal(size=n), 1)
        rows = [(f"T{i:04d}", str(g), str(lbl), float(s)) for i, (g, lbl, s) in enumerate(zip(groups, labels, scores))]
        return make_set(rows)

    return _make


@pytest.fixture
def tiny_config() -> SimConfig:
    return SimConfig(
        seed=42,
        models=[
            GroupClassModel(group="F", label=ClassLabel.bonafide, count=2, mean=1.0, stddev=1.0),
            GroupClassModel(group="F", label=ClassLabel.spoof, count=2, mean=-1.0, stddev=1.0),
        ],
    )
