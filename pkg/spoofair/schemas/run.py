from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .fairness import EoVariant, FairnessRow, MetricName, TeVariant
from .scoring import GroupPerformance, OperatingPoint
from .stats import HolmFamily
from .trial import ClassLabel, ColumnLayout, Polarity, normalize_group


class ReportFormat(str, Enum):
    markdown = "markdown"
    csv = "csv"
    json = "json"


class ScoreFormat(str, Enum):
    score = "score"
    logits = "logits"


class SystemPaths(BaseModel):
    model_config = ConfigDict(frozen=True)

    dev_protocol: Path
    dev_scores: Path
    eval_protocol: Path
    eval_scores: Path

    @model_validator(mode="after")
    def _distinct(self) -> "SystemPaths":
        if self.dev_protocol == self.dev_scores:
            raise ValueError("dev_protocol and dev_scores must be different files")
        if self.eval_protocol == self.eval_scores:
            raise ValueError("eval_protocol and eval_scores must be different files")
        if self.dev_scores == self.eval_scores:
            raise ValueError("dev_scores and eval_scores must be different files")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    systems: Dict[str, SystemPaths]
    layout: ColumnLayout = Field(default_factory=ColumnLayout)
    polarity: Union[Polarity, Literal["auto"]] = Polarity.higher_bonafide
    positive_class: ClassLabel = ClassLabel.spoof
    groups: Tuple[str, str] = ("F", "M")
    eo_variant: EoVariant = EoVariant.fpr
    te_variant: TeVariant = TeVariant.count_ratio
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    holm_family: HolmFamily = HolmFamily.per_run
    formats: List[ReportFormat] = Field(default_factory=lambda: [ReportFormat.markdown, ReportFormat.csv, ReportFormat.json])
    out_dir: Optional[Path] = None
    allow_orphans: bool = False
    score_format: ScoreFormat = ScoreFormat.score
    with_auc: bool = False
    timestamp: bool = False

    @field_validator("systems")
    @classmethod
    def _at_least_one(cls, value: Dict[str, SystemPaths]) -> Dict[str, SystemPaths]:
        if not value:
            raise ValueError("at least one system is required")
        return value

    @field_validator("groups")
    @classmethod
    def _pair(cls, value: Tuple[str, str]) -> Tuple[str, str]:
        pair = (normalize_group(value[0]), normalize_group(value[1]))
        if pair[0] == pair[1]:
            raise ValueError("group pair must name two different groups")
        return pair

    @field_validator("formats")
    @classmethod
    def _formats(cls, value: List[ReportFormat]) -> List[ReportFormat]:
        if not value:
            raise ValueError("at least one output format is required")
        return list(dict.fromkeys(value))


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True)

    toolkit: str
    version: str
    positive_class: ClassLabel
    polarity: Dict[str, Polarity]
    eo_variant: EoVariant
    te_variant: TeVariant
    alpha: float
    holm_family: HolmFamily
    groups: Tuple[str, str]
    config: Dict[str, object]
    generated_at: Optional[datetime] = None


class ReportBundle(BaseModel):
    model_config = ConfigDict(frozen=True)

    provenance: Provenance
    systems: List[str]
    operating_points: Dict[str, OperatingPoint]
    performance: List[GroupPerformance]
    fairness: Dict[MetricName, List[FairnessRow]]
