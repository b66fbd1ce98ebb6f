from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .stats import ProportionSample


class MetricName(str, Enum):
    SP = "SP"
    EOP = "EOP"
    EO = "EO"
    PP = "PP"
    TE = "TE"

    @property
    def display_name(self) -> str:
        return METRIC_TITLES[self]


METRIC_TITLES = {
    MetricName.SP: "Statistical parity",
    MetricName.EOP: "Equal opportunity",
    MetricName.EO: "Equality of odds",
    MetricName.PP: "Predictive parity",
    MetricName.TE: "Treatment equality",
}

METRIC_ORDER = (MetricName.SP, MetricName.EOP, MetricName.EO, MetricName.PP, MetricName.TE)


class EoVariant(str, Enum):
    fpr = "fpr"
    tpr_fpr_mean = "tpr_fpr_mean"


class TeVariant(str, Enum):
    count_ratio = "count_ratio"
    rate_ratio = "rate_ratio"


class MetricVariants(BaseModel):
    model_config = ConfigDict(frozen=True)

    eo: EoVariant = EoVariant.fpr
    te: TeVariant = TeVariant.count_ratio

    def for_metric(self, metric: MetricName) -> Optional[str]:
        if metric is MetricName.EO:
            return self.eo.value
        if metric is MetricName.TE:
            return self.te.value
        return None


class ConfusionCounts(BaseModel):
    model_config = ConfigDict(frozen=True)

    tp: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class GroupMetricValue(BaseModel):
    """
    One metric for one group. numerator/denominator back the proportion form
    and stay empty for the ratio (TE) and averaged (EO tpr_fpr_mean) forms.
    """

    model_config = ConfigDict(frozen=True)

    metric: MetricName
    group: str
    value: Optional[float] = None
    defined: bool = False
    numerator: Optional[int] = None
    denominator: Optional[int] = None


class FairnessRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    system: str
    metric: MetricName
    variant: Optional[str] = None
    groups: Tuple[str, str]
    values: Dict[str, GroupMetricValue]
    counts: Optional[Dict[str, ConfusionCounts]] = None
    samples: Optional[Tuple[ProportionSample, ProportionSample]] = None
    diff_f_minus_m: Optional[float] = None
    z: Optional[float] = None
    p_raw: Optional[float] = None
    p_holm: Optional[float] = None
    significant: Optional[bool] = None
    degenerate: bool = False

    @property
    def tested(self) -> bool:
        return self.p_raw is not None
