from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .trial import ClassLabel, normalize_group


class GroupClassModel(BaseModel):
    """Gaussian score model of one (group, class) cell."""

    model_config = ConfigDict(frozen=True)

    group: str
    label: ClassLabel
    count: int = Field(..., ge=0)
    mean: float
    stddev: float = Field(..., gt=0.0)

    @field_validator("group")
    @classmethod
    def _group(cls, value: str) -> str:
        return normalize_group(value)


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    models: List[GroupClassModel]
    seed: int = Field(..., ge=0, lt=2**64)
    id_prefix: str = Field("U", pattern=r"^\S*$")
    speakers_per_group: int = Field(20, ge=1)

    @model_validator(mode="after")
    def _cells(self) -> "SimConfig":
        labels = {m.label for m in self.models}
        if labels != {ClassLabel.bonafide, ClassLabel.spoof}:
            raise ValueError("at least one bonafide and one spoof model required")
        keys = [(m.group, m.label) for m in self.models]
        if len(set(keys)) != len(keys):
            raise ValueError("(group, class) pairs must be unique")
        return self


class CellExpectation(BaseModel):
    """Analytic decision statistics of one cell at a fixed threshold."""

    model_config = ConfigDict(frozen=True)

    group: str
    label: ClassLabel
    count: int
    p_decide_positive: float
    fpr: float = 0.0
    fnr: float = 0.0
    tp: float = 0.0
    fp: float = 0.0
    tn: float = 0.0
    fn: float = 0.0


class SimArtifacts(BaseModel):
    """Rendered output of one generation: protocol text, score text and manifest text."""

    model_config = ConfigDict(frozen=True)

    protocol: bytes
    scores: bytes
    manifest: bytes
    n_trials: int
