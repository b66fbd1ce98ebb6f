"""
Columnar containers backed by numpy arrays. Arrays are made read-only on
construction; the record views (``records()``) produce the pydantic row models.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .trial import ClassLabel, Polarity, ScoreRecord, TrialRecord, normalize_group, orientation_sign


def _frozen(values, dtype=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def _str_array(values: Sequence[str]) -> np.ndarray:
    if len(values) == 0:
        return _frozen([], dtype=np.str_)
    return _frozen(values, dtype=np.str_)


@dataclass(frozen=True, eq=False)
class TrialTable:
    """Parsed protocol rows in file order."""

    utt_ids: np.ndarray
    speaker_ids: np.ndarray
    groups: np.ndarray
    is_spoof: np.ndarray

    @classmethod
    def from_columns(
        cls, utt_ids: Sequence[str], speaker_ids: Sequence[str], groups: Sequence[str], is_spoof: Sequence[bool]
    ) -> "TrialTable":
        return cls(
            utt_ids=_str_array(utt_ids),
            speaker_ids=_str_array(speaker_ids),
            groups=_str_array(groups),
            is_spoof=_frozen(is_spoof, dtype=bool),
        )

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord]) -> "TrialTable":
        return cls.from_columns(
            [r.utt_id for r in records],
            [r.speaker_id for r in records],
            [r.group for r in records],
            [r.label is ClassLabel.spoof for r in records],
        )

    def __len__(self) -> int:
        return int(self.utt_ids.shape[0])

    def records(self) -> List[TrialRecord]:
        return [
            TrialRecord(
                utt_id=str(u),
                speaker_id=str(s),
                group=str(g),
                label=ClassLabel.spoof if sp else ClassLabel.bonafide,
            )
            for u, s, g, sp in zip(self.utt_ids, self.speaker_ids, self.groups, self.is_spoof)
        ]


@dataclass(frozen=True, eq=False)
class ScoreTable:
    utt_ids: np.ndarray
    scores: np.ndarray

    @classmethod
    def from_columns(cls, utt_ids: Sequence[str], scores: Sequence[float]) -> "ScoreTable":
        return cls(utt_ids=_str_array(utt_ids), scores=_frozen(scores, dtype=np.float64))

    @classmethod
    def from_records(cls, records: Sequence[ScoreRecord]) -> "ScoreTable":
        return cls.from_columns([r.utt_id for r in records], [r.score for r in records])

    def __len__(self) -> int:
        return int(self.utt_ids.shape[0])

    def records(self) -> List[ScoreRecord]:
        return [ScoreRecord(utt_id=str(u), score=float(s)) for u, s in zip(self.utt_ids, self.scores)]


@dataclass(frozen=True)
class EvaluationSet:
    """
    Trials joined with their scores, sorted by utt_id ascending.

    positive: per-trial Y (True when the trial belongs to ``positive_class``).
    oriented_scores: scores flipped so that a higher value always points at the positive class.
    """

    utt_ids: np.ndarray
    speaker_ids: np.ndarray
    groups: np.ndarray
    is_spoof: np.ndarray
    scores: np.ndarray
    polarity: Polarity
    positive_class: ClassLabel
    positive: np.ndarray = field(init=False, repr=False, compare=False)
    oriented_scores: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        positive = self.is_spoof if self.positive_class is ClassLabel.spoof else ~self.is_spoof
        positive = np.array(positive, dtype=bool)
        positive.flags.writeable = False
        oriented = orientation_sign(self.polarity, self.positive_class) * self.scores
        oriented.flags.writeable = False
        object.__setattr__(self, "positive", positive)
        object.__setattr__(self, "oriented_scores", oriented)

    @classmethod
    def from_arrays(
        cls,
        utt_ids: Sequence[str],
        groups: Sequence[str],
        labels: Sequence[ClassLabel],
        scores: Sequence[float],
        polarity: Polarity = Polarity.higher_bonafide,
        positive_class: ClassLabel = ClassLabel.spoof,
        speaker_ids: Optional[Sequence[str]] = None,
    ) -> "EvaluationSet":
        """Builds a set from parallel sequences, sorting by utt_id."""
        utt = np.array(utt_ids, dtype=np.str_)
        order = np.argsort(utt, kind="stable")
        spk = np.array(speaker_ids if speaker_ids is not None else ["-"] * len(utt), dtype=np.str_)
        grp = np.array([normalize_group(g) for g in groups], dtype=np.str_)
        spoof = np.array([ClassLabel(lbl) is ClassLabel.spoof for lbl in labels], dtype=bool)
        return cls(
            utt_ids=_frozen(utt[order]),
            speaker_ids=_frozen(spk[order]),
            groups=_frozen(grp[order]),
            is_spoof=_frozen(spoof[order]),
            scores=_frozen(np.asarray(scores, dtype=np.float64)[order]),
            polarity=Polarity(polarity),
            positive_class=ClassLabel(positive_class),
        )

    def __len__(self) -> int:
        return int(self.utt_ids.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvaluationSet):
            return NotImplemented
        return (
            self.polarity is other.polarity
            and self.positive_class is other.positive_class
            and np.array_equal(self.utt_ids, other.utt_ids)
            and np.array_equal(self.speaker_ids, other.speaker_ids)
            and np.array_equal(self.groups, other.groups)
            and np.array_equal(self.is_spoof, other.is_spoof)
            and np.array_equal(self.scores, other.scores)
        )

    def subset(self, mask: np.ndarray) -> "EvaluationSet":
        return EvaluationSet(
            utt_ids=_frozen(self.utt_ids[mask]),
            speaker_ids=_frozen(self.speaker_ids[mask]),
            groups=_frozen(self.groups[mask]),
            is_spoof=_frozen(self.is_spoof[mask]),
            scores=_frozen(self.scores[mask]),
            polarity=self.polarity,
            positive_class=self.positive_class,
        )

    def with_convention(
        self, polarity: Optional[Polarity] = None, positive_class: Optional[ClassLabel] = None
    ) -> "EvaluationSet":
        return EvaluationSet(
            utt_ids=self.utt_ids,
            speaker_ids=self.speaker_ids,
            groups=self.groups,
            is_spoof=self.is_spoof,
            scores=self.scores,
            polarity=polarity or self.polarity,
            positive_class=positive_class or self.positive_class,
        )

    def group_names(self) -> List[str]:
        return sorted(str(g) for g in np.unique(self.groups))

    def summary(self) -> Dict[str, object]:
        """Counts per group, per class and per (group, class) cell."""
        per_group: Dict[str, int] = {}
        per_cell: Dict[str, int] = {}
        for g in self.group_names():
            in_g = self.groups == g
            per_group[g] = int(in_g.sum())
            per_cell[f"{g}/bonafide"] = int((in_g & ~self.is_spoof).sum())
            per_cell[f"{g}/spoof"] = int((in_g & self.is_spoof).sum())
        n_spoof = int(self.is_spoof.sum())
        return {
            "n_total": len(self),
            "per_group": per_group,
            "per_class": {"bonafide": len(self) - n_spoof, "spoof": n_spoof},
            "per_cell": per_cell,
        }

    def records(self) -> List[Tuple[TrialRecord, float]]:
        trials = TrialTable(self.utt_ids, self.speaker_ids, self.groups, self.is_spoof).records()
        return list(zip(trials, (float(s) for s in self.scores)))


@dataclass(frozen=True, eq=False)
class GroupPartition:
    groups: Dict[str, EvaluationSet]
    all: EvaluationSet


@dataclass(frozen=True, eq=False)
class DetCurve:
    """
    Sweep over every distinct oriented score. Decision rule at threshold t:
    positive iff oriented score >= t. thresholds[0] = -inf and thresholds[-1] = +inf
    are the sentinel points (fpr, fnr) = (1, 0) and (0, 1).
    """

    thresholds: np.ndarray
    fp_counts: np.ndarray
    fn_counts: np.ndarray
    n_pos: int
    n_neg: int

    @property
    def fpr(self) -> np.ndarray:
        return self.fp_counts / self.n_neg

    @property
    def fnr(self) -> np.ndarray:
        return self.fn_counts / self.n_pos

    def __len__(self) -> int:
        return int(self.thresholds.shape[0])

    def index_at(self, threshold: float) -> int:
        """Sweep index reproducing the decisions made at an arbitrary threshold."""
        return int(np.searchsorted(self.thresholds, threshold, side="left"))

    def rates_at(self, threshold: float) -> Tuple[float, float]:
        i = self.index_at(threshold)
        return float(self.fp_counts[i] / self.n_neg), float(self.fn_counts[i] / self.n_pos)


@dataclass(frozen=True, eq=False)
class DecisionVector:
    """Per-trial Ŷ aligned to an EvaluationSet; True means the positive class was predicted."""

    predicted_positive: np.ndarray

    def __len__(self) -> int:
        return int(self.predicted_positive.shape[0])
