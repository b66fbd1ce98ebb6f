from pathlib import Path

import pytest
from pydantic import ValidationError

from spoofair.core.config import Settings, settings
from spoofair.core.errors import (
    ConfigError,
    CrossCheckMismatch,
    FileMissing,
    InputError,
    InternalError,
    MalformedRow,
    SpoofairError,
)
from spoofair.repositories import store
from spoofair.schemas import ColumnLayout, HolmFamily, Polarity, ReportFormat, RunConfig, SystemPaths

RUN_TOML = """
polarity = "higher-spoof"
alpha = 0.01
groups = ["f", "m"]
out_dir = "out"

[systems.wavlm]
dev_protocol = "dev/protocol.txt"
dev_scores = "dev/scores.txt"
eval_protocol = "/data/eval/protocol.txt"
eval_scores = "eval/scores.txt"
"""


def _paths(**overrides):
    base = {"dev_protocol": "a", "dev_scores": "b", "eval_protocol": "c", "eval_scores": "d"}
    base.update(overrides)
    return base


def test_settings_env_override(monkeypatch):
    monkeypatch.setenv("SPOOFAIR_ALPHA", "0.01")
    monkeypatch.setenv("SPOOFAIR_WORKERS", "4")
    monkeypatch.setenv("SPOOFAIR_OUT_DIR", "/tmp/spoofair")
    loaded = Settings()
    assert loaded.alpha == 0.01
    assert loaded.workers == 4
    assert loaded.out_dir == Path("/tmp/spoofair")


def test_settings_validation(monkeypatch):
    monkeypatch.setenv("SPOOFAIR_ALPHA", "2")
    with pytest.raises(ValidationError):
        Settings()


def test_load_run_config_resolves_relative_paths(tmp_path):
    (tmp_path / "run.toml").write_text(RUN_TOML)
    config = store.load_run_config(tmp_path / "run.toml")
    paths = config.systems["wavlm"]
    assert paths.dev_protocol == tmp_path / "dev" / "protocol.txt"
    assert paths.eval_protocol == Path("/data/eval/protocol.txt")
    assert config.out_dir == tmp_path / "out"
    assert config.polarity is Polarity.higher_spoof
    assert config.groups == ("F", "M")
    assert config.alpha == 0.01
    assert config.holm_family is HolmFamily.per_run
    assert config.formats == [ReportFormat.markdown, ReportFormat.csv, ReportFormat.json]


def test_overrides_win_and_none_is_ignored(tmp_path):
    (tmp_path / "run.toml").write_text(RUN_TOML)
    config = store.load_run_config(
        tmp_path / "run.toml", {"alpha": 0.1, "polarity": None, "formats": ["json", "json"], "layout": {"utt": 0, "speaker": 1}}
    )
    assert config.alpha == 0.1
    assert config.polarity is Polarity.higher_spoof
    assert config.formats == [ReportFormat.json]
    assert config.layout == ColumnLayout(utt=0, speaker=1)


def test_bad_toml_and_missing_file(tmp_path):
    (tmp_path / "run.toml").write_text("systems = [\n")
    with pytest.raises(ConfigError):
        store.load_run_config(tmp_path / "run.toml")
    with pytest.raises(FileMissing):
        store.load_run_config(tmp_path / "absent.toml")


@pytest.mark.parametrize(
    "raw,fragment",
    [
        ({"systems": {}}, "systems"),
        ({"systems": {"a": _paths()}, "alpha": 0.0}, "alpha"),
        ({"systems": {"a": _paths()}, "groups": ["F", "f"]}, "groups"),
        ({"systems": {"a": _paths(dev_scores="a")}}, "different files"),
        ({"systems": {"a": _paths()}, "polarity": "sideways"}, "polarity"),
        ({"systems": {"a": _paths()}, "formats": []}, "formats"),
    ],
)
def test_run_config_validation(raw, fragment):
    with pytest.raises(ConfigError) as exc:
        store.build_run_config(raw)
    assert fragment in exc.value.detail


def test_run_config_accepts_auto_polarity():
    config = RunConfig(systems={"a": SystemPaths(**_paths())}, polarity="auto")
    assert config.polarity == "auto"


def test_column_layout_rules():
    with pytest.raises(ValidationError):
        ColumnLayout(utt=0)
    with pytest.raises(ValidationError):
        ColumnLayout(n_columns=3)
    with pytest.raises(ValidationError):
        ColumnLayout(label_tokens={"real": "bonafide"})
    assert ColumnLayout(label_tokens={" Real ": "bonafide", "FAKE": "spoof"}).label_tokens == {"real": "bonafide", "fake": "spoof"}


def test_write_outputs_creates_directory(tmp_path):
    written = store.write_outputs(tmp_path / "a" / "b", {"x.txt": b"1\n"})
    assert written["x.txt"].read_bytes() == b"1\n"


def test_error_contract():
    assert issubclass(ConfigError, InputError)
    assert InputError("x").exit_code == 1
    assert InternalError("x").exit_code == 2
    assert SpoofairError("x").exit_code == 2

    exc = MalformedRow(3, "too few columns", "proto.txt").with_context("sys1")
    assert str(exc) == "[sys1] malformed row at proto.txt:3: too few columns"
    assert exc.line_no == 3

    mismatch = CrossCheckMismatch("EO", "F", "value")
    assert isinstance(mismatch, InternalError)
    assert mismatch.metric == "EO" and mismatch.group == "F"


def test_alpha_falls_back_to_settings(monkeypatch):
    monkeypatch.setattr(settings, "alpha", 0.01)
    assert store.build_run_config({"systems": {"a": _paths()}}).alpha == 0.01
    assert store.build_run_config({"systems": {"a": _paths()}, "alpha": 0.1}).alpha == 0.1
    assert store.build_run_config({"systems": {"a": _paths()}, "alpha": 0.1}, {"alpha": 0.2}).alpha == 0.2
