from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ClassLabel(str, Enum):
    bonafide = "bonafide"
    spoof = "spoof"


class Polarity(str, Enum):
    higher_bonafide = "higher-bonafide"
    higher_spoof = "higher-spoof"

    def flipped(self) -> "Polarity":
        return Polarity.higher_spoof if self is Polarity.higher_bonafide else Polarity.higher_bonafide


def normalize_group(token: str) -> str:
    """Upper-case a gender/group token; rejects empty tokens and embedded whitespace."""
    value = token.strip()
    if not value or any(ch.isspace() for ch in value):
        raise ValueError(f"invalid group token {token!r}")
    return value.upper()


def orientation_sign(polarity: Polarity, positive_class: ClassLabel) -> float:
    """+1 when higher raw scores point at the positive class, -1 otherwise."""
    higher_is_spoof = polarity is Polarity.higher_spoof
    positive_is_spoof = positive_class is ClassLabel.spoof
    return 1.0 if higher_is_spoof == positive_is_spoof else -1.0


DEFAULT_LABEL_TOKENS: Dict[str, ClassLabel] = {"bonafide": ClassLabel.bonafide, "spoof": ClassLabel.spoof}


class ColumnLayout(BaseModel):
    """
    Column positions (0-based) of a protocol file. The default is the ASVspoof-style
    order ``speaker utt gender label``.

    delimiter: None splits on any run of whitespace.
    n_columns: when set, rows must have exactly this many fields.
    """

    model_config = ConfigDict(frozen=True)

    speaker: int = Field(default=0, ge=0)
    utt: int = Field(default=1, ge=0)
    gender: int = Field(default=2, ge=0)
    label: int = Field(default=3, ge=0)
    delimiter: Optional[str] = None
    n_columns: Optional[int] = Field(default=None, ge=1)
    label_tokens: Dict[str, ClassLabel] = Field(default_factory=lambda: dict(DEFAULT_LABEL_TOKENS))

    @field_validator("label_tokens")
    @classmethod
    def _lower_tokens(cls, value: Dict[str, ClassLabel]) -> Dict[str, ClassLabel]:
        lowered = {k.strip().lower(): v for k, v in value.items()}
        if set(lowered.values()) != {ClassLabel.bonafide, ClassLabel.spoof}:
            raise ValueError("label_tokens must map to both bonafide and spoof")
        return lowered

    @field_validator("delimiter")
    @classmethod
    def _non_empty_delimiter(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value == "":
            raise ValueError("delimiter cannot be empty")
        return value

    @model_validator(mode="after")
    def _distinct_columns(self) -> "ColumnLayout":
        cols = [self.speaker, self.utt, self.gender, self.label]
        if len(set(cols)) != 4:
            raise ValueError(f"column indices must be distinct, got {cols}")
        if self.n_columns is not None and self.n_columns <= max(cols):
            raise ValueError(f"n_columns={self.n_columns} too small for column index {max(cols)}")
        return self

    @property
    def min_columns(self) -> int:
        return self.n_columns or max(self.speaker, self.utt, self.gender, self.label) + 1


class TrialRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    utt_id: str = Field(..., min_length=1)
    speaker_id: str = Field(..., min_length=1)
    group: str
    label: ClassLabel

    @field_validator("group")
    @classmethod
    def _group(cls, value: str) -> str:
        return normalize_group(value)


class ScoreRecord(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    utt_id: str = Field(..., min_length=1)
    score: float
