"""
Application settings for PyRunShaper.

These are the knobs of the workbench itself: how many seeds train at once,
where runs go, and how large the gradient-check and invariance suites are.
Experiment settings (environment, agent, shaping, presets) are validated by
:mod:`pyrunshaper.models` instead.

Sources, strongest first:

* ``PYRUNSHAPER_<SECTION>__<KEY>`` environment variables
* the YAML file (``PYRUNSHAPER_CONFIG_PATH``, then ``./config.yaml``, then the
  packaged defaults)
* field defaults

``RUNNER_THREADS`` additionally caps the runner's thread count.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from pyrunshaper.core.errors import ConfigurationError

# Settings load before logging is configured.
_log = logging.getLogger(__name__)

RUNNER_THREADS_ENV = "RUNNER_THREADS"
CONFIG_PATH_ENV = "PYRUNSHAPER_CONFIG_PATH"
PACKAGED_CONFIG = Path(__file__).with_name("config.yaml")


class RunnerSettings(BaseModel):
    """Experiment runner configuration."""
    threads: int = Field(
        default=1, ge=1, le=256,
        description="Maximum number of seeds trained concurrently")
    output_dir: str = Field(
        default="runs", description="Default output directory for `run`")
    record_wall_clock: bool = Field(
        default=False,
        description="Write real elapsed seconds into learning curves "
                    "(breaks bit-identical re-runs)")


class GradcheckSettings(BaseModel):
    cases: int = Field(default=20, ge=1, le=1000)
    max_params_per_case: int = Field(
        default=256, ge=1,
        description="Parameters sampled per case for finite differences")
    step: float = Field(default=1e-3, gt=0.0)
    tolerance: float = Field(default=1e-4, gt=0.0)


class VerifySettings(BaseModel):
    episodes: int = Field(default=50_000, ge=1)
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    paired_updates: int = Field(default=100_000, ge=1)


class LoggingSettings(BaseModel):
    """A ``logging.config.dictConfig`` dictionary, passed through untouched."""
    model_config = ConfigDict(extra='allow')

    version: int = 1
    disable_existing_loggers: bool = False
    formatters: dict[str, Any] = Field(default_factory=dict)
    handlers: dict[str, Any] = Field(default_factory=dict)
    root: dict[str, Any] = Field(default_factory=dict)
    loggers: dict[str, Any] = Field(default_factory=dict)


def config_search_paths() -> list[Path]:
    """Candidate config files in lookup order."""
    paths = [Path("config.yaml"), PACKAGED_CONFIG]
    if os.getenv(CONFIG_PATH_ENV):
        paths.insert(0, Path(os.environ[CONFIG_PATH_ENV]))
    return paths


def find_config_file() -> Path:
    """
    First existing file of :func:`config_search_paths`.

    Raises:
        FileNotFoundError: If none exists
    """
    candidates = config_search_paths()
    for path in candidates:
        if path.is_file():
            return path
    listing = "\n".join(f"  - {p}" for p in candidates)
    raise FileNotFoundError(
        f"No configuration file found. Searched in:\n{listing}\n"
        f"Set {CONFIG_PATH_ENV} or place config.yaml in the working directory.")


class AppSettings(BaseSettings):
    """
    Validated application settings.

    Example override: ``PYRUNSHAPER_RUNNER__THREADS=4``.
    """

    runner: RunnerSettings = Field(default_factory=RunnerSettings)
    gradcheck: GradcheckSettings = Field(default_factory=GradcheckSettings)
    verify: VerifySettings = Field(default_factory=VerifySettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    model_config = SettingsConfigDict(
        env_prefix="PYRUNSHAPER_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # YAML data arrives as init kwargs; the environment overrides it key by key.
        return env_settings, init_settings

    @classmethod
    def from_yaml(cls, config_path: str | os.PathLike | None = None) -> AppSettings:
        """
        Load and validate a YAML config file.

        Args:
            config_path: File to read; searched for when omitted

        Raises:
            FileNotFoundError: If the file (or any candidate) does not exist
            ConfigurationError: If the YAML is malformed or fails validation
        """
        path = Path(config_path) if config_path is not None else find_config_file()
        _log.debug("Loading configuration from %s", path)
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file not found: {path}") from None
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in configuration file {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(
                f"Configuration file {path} must hold a mapping, got {type(data).__name__}")
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigurationError(f"Configuration validation failed for {path}:\n{e}")


class ConfigManager:
    """Process-wide holder of the loaded :class:`AppSettings`."""

    _instance: ConfigManager | None = None
    _settings: AppSettings | None = None
    _config_path: str | None = None

    @classmethod
    def get_instance(cls) -> ConfigManager:
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    @classmethod
    def reset_instance(cls) -> None:
        """Forget the loaded settings (tests)."""
        cls._instance = None
        cls._settings = None
        cls._config_path = None

    def load(self, config_path: str | None = None) -> dict[str, Any]:
        """
        Load settings, or return the cached ones when no path is given.

        Returns:
            The settings as a plain dictionary
        """
        if self._settings is None or config_path is not None:
            ConfigManager._settings = AppSettings.from_yaml(config_path)
            ConfigManager._config_path = config_path
        return self._settings.model_dump()

    @property
    def settings(self) -> AppSettings:
        if self._settings is None:
            self.load()
        return self._settings

    def get(self, key: str, default: Any = None) -> Any:
        """Dotted lookup, e.g. ``get("runner.threads")``."""
        node: Any = self.settings.model_dump()
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def get_config(self) -> dict[str, Any]:
        return self.settings.model_dump()

    def get_config_path(self) -> str | None:
        return self._config_path

    @property
    def runner_threads(self) -> int:
        """
        Concurrent seed cap; a set ``RUNNER_THREADS`` wins over ``runner.threads``.

        Raises:
            ConfigurationError: If ``RUNNER_THREADS`` is not a positive integer
        """
        raw = os.getenv(RUNNER_THREADS_ENV)
        if not raw:
            return self.settings.runner.threads
        try:
            threads = int(raw)
        except ValueError:
            threads = 0
        if threads < 1:
            raise ConfigurationError(
                f"{RUNNER_THREADS_ENV} must be a positive integer, got {raw!r}")
        return threads

    @property
    def output_dir(self) -> str:
        return self.settings.runner.output_dir

    @property
    def record_wall_clock(self) -> bool:
        return self.settings.runner.record_wall_clock

    @property
    def gradcheck(self) -> GradcheckSettings:
        return self.settings.gradcheck

    @property
    def verify(self) -> VerifySettings:
        return self.settings.verify

    @property
    def logging_config(self) -> dict[str, Any]:
        return self.settings.logging.model_dump()


def get_config_manager() -> ConfigManager:
    return ConfigManager.get_instance()


__all__ = [
    'AppSettings',
    'ConfigManager',
    'GradcheckSettings',
    'LoggingSettings',
    'RUNNER_THREADS_ENV',
    'RunnerSettings',
    'VerifySettings',
    'config_search_paths',
    'find_config_file',
    'get_config_manager',
]
