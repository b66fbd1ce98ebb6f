"""
Error hierarchy. Every error carries the process exit code the CLI returns for it
and a human readable detail string.
"""

from typing import Iterable, List, Optional


class SpoofairError(Exception):
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def with_context(self, context: str) -> "SpoofairError":
        self.detail = f"[{context}] {self.detail}"
        self.args = (self.detail,)
        return self

    def __str__(self) -> str:
        return self.detail


class InputError(SpoofairError):
    exit_code = 1


class InternalError(SpoofairError):
    exit_code = 2


def _preview(items: List[str], limit: int = 5) -> str:
    shown = ", ".join(items[:limit])
    if len(items) > limit:
        shown += f", ... ({len(items)} total)"
    return shown


# Parsing ------------------------------------------------------------------
class MalformedRow(InputError):
    def __init__(self, line_no: int, reason: str, source: Optional[str] = None):
        self.line_no = line_no
        self.reason = reason
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(f"malformed row at {where}: {reason}")


class DuplicateUtt(InputError):
    def __init__(self, utt_id: str):
        self.utt_id = utt_id
        super().__init__(f"duplicate utterance id {utt_id!r}")


class EmptyFile(InputError):
    def __init__(self, source: Optional[str] = None):
        super().__init__(f"no trials found in {source or 'input'}")


class NonFiniteScore(InputError):
    def __init__(self, utt_id: str):
        self.utt_id = utt_id
        super().__init__(f"non-finite score for {utt_id!r}")


class NonFiniteInput(InputError):
    def __init__(self, what: str):
        super().__init__(f"non-finite input: {what}")


class FileMissing(InputError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"file not found: {path}")


class UnreadableFile(InputError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot read {path}: {reason}")


class ConfigError(InputError):
    pass


# Joining ------------------------------------------------------------------
class MissingScore(InputError):
    def __init__(self, utt_ids: Iterable[str]):
        self.utt_ids = sorted(utt_ids)
        super().__init__(f"{len(self.utt_ids)} trial(s) without a score: {_preview(self.utt_ids)}")


class OrphanScore(InputError):
    def __init__(self, utt_ids: Iterable[str]):
        self.utt_ids = sorted(utt_ids)
        super().__init__(
            f"{len(self.utt_ids)} score(s) without a trial: {_preview(self.utt_ids)} (use --allow-orphans to ignore)"
        )


# Evaluation ---------------------------------------------------------------
class DegenerateSet(InputError):
    def __init__(self, reason: str):
        super().__init__(f"degenerate evaluation set: {reason}")


class PolarityMismatch(InputError):
    def __init__(self, expected: str, got: str):
        super().__init__(f"operating point convention {got} does not match evaluation set {expected}")


class LengthMismatch(InputError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"decision vector has {got} entries, evaluation set has {expected}")


class MissingGroup(InputError):
    def __init__(self, group: str, available: Iterable[str]):
        self.group = group
        super().__init__(f"group {group!r} not present (available: {', '.join(sorted(available)) or 'none'})")


class InvalidP(InputError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"p-value {value!r} outside [0, 1]")


# Simulation ---------------------------------------------------------------
class CapExceeded(InputError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"cell count {count} exceeds cap {cap}")


class TooLarge(InputError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"{n} trials exceed the brute-force cap of {cap}")


class CrossCheckMismatch(InternalError):
    def __init__(self, metric: str, group: str, field: str = "value"):
        self.metric = metric
        self.group = group
        super().__init__(f"cross-check mismatch for {metric} ({group}, {field})")
