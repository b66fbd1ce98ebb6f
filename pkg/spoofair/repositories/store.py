"""
Filesystem helpers: read input files, load run configs and write report files.
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import ValidationError

from ..core.config import settings
from ..core.errors import ConfigError, FileMissing, UnreadableFile
from ..schemas import RunConfig

logger = logging.getLogger(__name__)

PATH_KEYS = ("dev_protocol", "dev_scores", "eval_protocol", "eval_scores")


# Inputs -------------------------------------------------------------------
def read_input(path: Path) -> bytes:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise FileMissing(str(path)) from exc
    except IsADirectoryError as exc:
        raise FileMissing(f"{path} (is a directory)") from exc
    except OSError as exc:
        raise UnreadableFile(str(path), exc.strerror or type(exc).__name__) from exc
    logger.debug("Read %d bytes from %s", len(data), path)
    return data


# Run config ---------------------------------------------------------------
def _resolve_paths(raw: Dict[str, Any], base: Path) -> Dict[str, Any]:
    systems = raw.get("systems")
    if not isinstance(systems, dict):
        return raw
    resolved = {}
    for name, entry in systems.items():
        if not isinstance(entry, dict):
            raise ConfigError(f"[systems.{name}] must be a table")
        fixed = dict(entry)
        for key in PATH_KEYS:
            if key in fixed and not Path(fixed[key]).is_absolute():
                fixed[key] = str(base / fixed[key])
        resolved[name] = fixed
    out = dict(raw)
    out["systems"] = resolved
    if "out_dir" in out and out["out_dir"] is not None and not Path(out["out_dir"]).is_absolute():
        out["out_dir"] = str(base / out["out_dir"])
    return out


def load_config_mapping(path: Path) -> Dict[str, Any]:
    """TOML run config as a plain mapping, relative paths resolved against its directory."""
    path = Path(path)
    data = read_input(path)
    try:
        raw = tomllib.loads(data.decode("utf-8-sig"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return _resolve_paths(raw, path.parent)


def build_run_config(raw: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    merged = dict(raw)
    merged.setdefault("alpha", settings.alpha)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid run config: {problems}") from exc


def load_run_config(path: Path, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    config = build_run_config(load_config_mapping(path), overrides)
    logger.info("Loaded run config %s: systems=%s", path, list(config.systems))
    return config


# Outputs ------------------------------------------------------------------
def write_outputs(out_dir: Path, files: Mapping[str, bytes]) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: Dict[str, Path] = {}
    for name, payload in files.items():
        target = out_dir / name
        target.write_bytes(payload)
        written[name] = target
    logger.info("Wrote %d file(s) to %s", len(written), out_dir)
    return written
