from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .trial import ClassLabel, Polarity, orientation_sign


class SourceSplit(str, Enum):
    dev = "dev"
    eval = "eval"
    custom = "custom"


class OperatingPoint(BaseModel):
    """
    Decision threshold in oriented-score space: a trial is predicted positive iff
    its oriented score is >= threshold. ``raw_threshold`` is the same cut expressed
    on the score file's own scale.
    """

    model_config = ConfigDict(frozen=True)

    threshold: float
    eer_at_derivation: float = Field(..., ge=0.0, le=1.0)
    crossing_gap: float = Field(..., ge=0.0, le=1.0)
    source_split: SourceSplit = SourceSplit.dev
    polarity: Polarity
    positive_class: ClassLabel

    @property
    def raw_threshold(self) -> float:
        return orientation_sign(self.polarity, self.positive_class) * self.threshold

    @property
    def raw_rule(self) -> str:
        sign = orientation_sign(self.polarity, self.positive_class)
        op = ">=" if sign > 0 else "<="
        return f"predict {self.positive_class.value} iff score {op} {self.raw_threshold!r}"


class GroupPerformance(BaseModel):
    """EER (and optionally AUC) of one system on one evaluation subset."""

    model_config = ConfigDict(frozen=True)

    system: str
    group: str
    n_trials: int
    eer: Optional[float] = None
    eer_threshold: Optional[float] = None
    auc: Optional[float] = None
