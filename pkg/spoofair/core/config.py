from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-level defaults. Every field reads ``SPOOFAIR_<FIELD>`` or ``.env``."""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="SPOOFAIR_", extra="ignore")

    app_name: str = "spoofair"
    app_version: str = "0.1.0"

    out_dir: Path = Field(default=Path("./reports"), description="Default report directory")
    log_level: str = "INFO"

    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    sim_count_cap: int = Field(default=10_000_000, ge=1)
    brute_force_cap: int = Field(default=100_000, ge=1)
    workers: int = Field(default=1, ge=1, description="Systems evaluated concurrently")


settings = Settings()
