from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class HolmFamily(str, Enum):
    per_run = "per_run"
    per_metric = "per_metric"


class ProportionSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    successes: int = Field(..., ge=0)
    trials: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _bounded(self) -> "ProportionSample":
        if self.successes > self.trials:
            raise ValueError(f"successes {self.successes} exceed trials {self.trials}")
        return self

    @property
    def proportion(self) -> float:
        return self.successes / self.trials


class TestResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: float
    p_two_sided: float = Field(..., ge=0.0, le=1.0)
    method: str = "pooled-z"
    defined: bool = True
    degenerate: bool = False


class HolmOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_adjusted: List[float]
    reject: List[bool]
