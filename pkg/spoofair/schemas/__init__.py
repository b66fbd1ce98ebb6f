from .trial import ClassLabel, ColumnLayout, Polarity, ScoreRecord, TrialRecord, normalize_group, orientation_sign
from .tables import DecisionVector, DetCurve, EvaluationSet, GroupPartition, ScoreTable, TrialTable
from .stats import HolmFamily, HolmOutcome, ProportionSample, TestResult
from .scoring import GroupPerformance, OperatingPoint, SourceSplit
from .fairness import (
    METRIC_ORDER,
    ConfusionCounts,
    EoVariant,
    FairnessRow,
    GroupMetricValue,
    MetricName,
    MetricVariants,
    TeVariant,
)
from .sim import CellExpectation, GroupClassModel, SimArtifacts, SimConfig
from .run import Provenance, ReportBundle, ReportFormat, RunConfig, ScoreFormat, SystemPaths

__all__ = [
    "ClassLabel",
    "ColumnLayout",
    "Polarity",
    "ScoreRecord",
    "TrialRecord",
    "normalize_group",
    "orientation_sign",
    "DecisionVector",
    "DetCurve",
    "EvaluationSet",
    "GroupPartition",
    "ScoreTable",
    "TrialTable",
    "HolmFamily",
    "HolmOutcome",
    "ProportionSample",
    "TestResult",
    "GroupPerformance",
    "OperatingPoint",
    "SourceSplit",
    "METRIC_ORDER",
    "ConfusionCounts",
    "EoVariant",
    "FairnessRow",
    "GroupMetricValue",
    "MetricName",
    "MetricVariants",
    "TeVariant",
    "CellExpectation",
    "GroupClassModel",
    "SimArtifacts",
    "SimConfig",
    "Provenance",
    "ReportBundle",
    "ReportFormat",
    "RunConfig",
    "ScoreFormat",
    "SystemPaths",
]
