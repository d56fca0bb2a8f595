"""Layered configuration using Pydantic Settings.

Configuration priority (highest wins):
    1. CLI arguments (applied by the CLI layer on top of settings)
    2. Environment variables  (FOTOC_MONTE_CARLO__SAMPLES=20000)
    3. .env file
    4. config.yaml            (optional, loaded if present)
    5. Defaults               (from defaults.py)

Environment variable naming:
    - Top-level:  FOTOC_LOG_LEVEL=DEBUG
    - Nested:     FOTOC_CAPS__TABLE=5  (double underscore = nesting)
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from . import defaults as d

# ── Nested Config Models ────────────────────────────────────────────


class CapsConfig(BaseModel):
    """Resource caps for enumeration, tables and dense simulation."""

    enumeration: int = Field(default=d.DEFAULT_ENUMERATION_CAP, ge=1, le=10)
    counting: int = Field(default=d.DEFAULT_COUNTING_CAP, ge=1, le=10)
    pair_enumeration: int = Field(default=d.DEFAULT_PAIR_ENUMERATION_CAP, ge=1, le=8)
    pair_counting: int = Field(default=d.DEFAULT_PAIR_COUNTING_CAP, ge=1, le=9)
    table: int = Field(default=d.DEFAULT_TABLE_CAP, ge=1, le=7)
    exact_transfer: int = Field(default=d.DEFAULT_EXACT_TRANSFER_CAP, ge=1, le=6)
    transfer: int = Field(default=d.DEFAULT_TRANSFER_CAP, ge=1, le=7)
    dense_dim: int = Field(default=d.DEFAULT_DENSE_DIM_CAP, ge=2, le=4096)
    replica_dim: int = Field(default=d.DEFAULT_REPLICA_DIM_CAP, ge=2, le=1 << 16)


class WeingartenCacheConfig(BaseModel):
    """On-disk cache of exact Weingarten class values."""

    enabled: bool = d.DEFAULT_WG_CACHE_ENABLED
    path: Path = Field(default=Path(d.DEFAULT_WG_CACHE_PATH))


class MonteCarloConfig(BaseModel):
    """Sampling defaults for the Monte Carlo estimators."""

    samples: int = Field(default=d.DEFAULT_MC_SAMPLES, ge=2)
    seed: int = Field(default=d.DEFAULT_MC_SEED, ge=0, lt=1 << 64)
    workers: int = Field(default=d.DEFAULT_MC_WORKERS, ge=1, le=256)
    stderr_sigmas: float = Field(default=d.DEFAULT_STDERR_SIGMAS, gt=0.0)


class OutputConfig(BaseModel):
    """Output file and formatting configuration."""

    directory: Path = Field(default=Path(d.DEFAULT_OUTPUT_DIR))
    float_format: str = Field(default=d.DEFAULT_FLOAT_FORMAT, pattern=r"^\.\d+[eEfFgG]$")


# ── Root Settings ────────────────────────────────────────────────────


class Settings(BaseSettings):
    """Root configuration: aggregates all sub-configs.

    Load priority: defaults → config.yaml → .env → environment variables.
    Environment variables use FOTOC_ prefix and __ for nesting:
        FOTOC_MONTE_CARLO__WORKERS=4
        FOTOC_WEINGARTEN_CACHE__ENABLED=true
    """

    model_config = SettingsConfigDict(
        env_prefix="FOTOC_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        """Add config.yaml as a source between defaults and env/.env.

        Priority (highest wins): init kwargs → env vars → .env → config.yaml → defaults.
        """
        from pydantic_settings import PydanticBaseSettingsSource

        class YamlSettingsSource(PydanticBaseSettingsSource):
            def get_field_value(self, field, field_name):
                return None, field_name, False

            def __call__(self):
                import yaml

                for candidate in (
                    Path.cwd() / "config.yaml",
                    Path.home() / ".config" / "free-otoc" / "config.yaml",
                ):
                    if candidate.is_file():
                        try:
                            data = yaml.safe_load(candidate.read_text(encoding="utf-8"))
                        except (OSError, yaml.YAMLError):
                            continue
                        if isinstance(data, dict):
                            return data
                return {}

        return (
            init_settings,
            env_settings,
            dotenv_settings,
            YamlSettingsSource(settings_cls),
        )

    # Sub-configurations
    caps: CapsConfig = Field(default_factory=CapsConfig)
    weingarten_cache: WeingartenCacheConfig = Field(default_factory=WeingartenCacheConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    # Top-level settings
    log_level: str = Field(default=d.DEFAULT_LOG_LEVEL, pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")

    @model_validator(mode="before")
    @classmethod
    def _load_dotenv(cls, data: Any) -> Any:
        """Make .env values visible to code that reads ``os.environ`` directly."""
        from dotenv import load_dotenv

        load_dotenv()
        return data


# ── Singleton access ─────────────────────────────────────────────────

_settings: Settings | None = None


def get_settings(**overrides: Any) -> Settings:
    """Return the process-wide Settings, building it on first use.

    Passing overrides always builds a fresh instance (and caches it).
    """
    global _settings
    if _settings is None or overrides:
        _settings = Settings(**overrides)
    return _settings


def reset_settings() -> None:
    """Drop the cached Settings (used by tests)."""
    global _settings
    _settings = None
