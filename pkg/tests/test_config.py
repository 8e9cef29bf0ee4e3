"""
Tests for configuration management system.

Tests cover:
- Configuration file loading from multiple paths
- Environment variable overrides, including RUNNER_THREADS
- Configuration validation
- Error handling for missing/invalid configs
"""

import os
import tempfile

import pytest
import yaml
from pydantic import ValidationError

from pyrunshaper.config.settings import (
    AppSettings,
    ConfigManager,
    GradcheckSettings,
    RunnerSettings,
    VerifySettings,
    config_search_paths,
    get_config_manager,
)
from pyrunshaper.core.errors import ConfigurationError


@pytest.fixture(autouse=True)
def reset_config(monkeypatch):
    """Reset config manager before each test."""
    monkeypatch.delenv("RUNNER_THREADS", raising=False)
    ConfigManager.reset_instance()
    yield
    ConfigManager.reset_instance()


@pytest.fixture
def valid_config():
    """Return a valid configuration dictionary."""
    return {
        "runner": {
            "threads": 2,
            "output_dir": "experiments",
            "record_wall_clock": False,
        },
        "gradcheck": {
            "cases": 5,
            "max_params_per_case": 64,
            "step": 1e-3,
            "tolerance": 1e-4,
        },
        "verify": {
            "episodes": 2000,
            "seeds": [0, 1],
            "paired_updates": 1000,
        },
        "logging": {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "standard": {
                    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
                }
            },
            "handlers": {
                "console": {
                    "class": "logging.StreamHandler",
                    "level": "INFO",
                    "formatter": "standard"
                }
            },
            "root": {
                "level": "INFO",
                "handlers": ["console"]
            }
        }
    }


@pytest.fixture
def config_file(valid_config):
    """Create a temporary config file."""
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
        yaml.dump(valid_config, f)
        config_path = f.name

    yield config_path

    if os.path.exists(config_path):
        os.unlink(config_path)


def _write_temp_config(data) -> str:
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
        yaml.dump(data, f)
        return f.name


class TestConfigLoading:
    """Test configuration loading from files."""

    def test_load_config_from_explicit_path(self, config_file):
        config_manager = get_config_manager()
        config = config_manager.load(config_file)

        assert config['runner']['threads'] == 2
        assert config['verify']['seeds'] == [0, 1]
        assert config_manager.get_config_path() == config_file

    def test_load_config_from_env_var(self, config_file, monkeypatch):
        monkeypatch.setenv("PYRUNSHAPER_CONFIG_PATH", config_file)

        config_manager = get_config_manager()
        config = config_manager.load()

        assert config['runner']['output_dir'] == 'experiments'

    def test_config_file_not_found(self):
        config_manager = get_config_manager()

        with pytest.raises(FileNotFoundError) as exc_info:
            config_manager.load("/nonexistent/path/config.yaml")

        assert "not found" in str(exc_info.value).lower()

    def test_invalid_yaml(self):
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            f.write("invalid: yaml: content: [")
            invalid_config_path = f.name

        try:
            config_manager = get_config_manager()
            with pytest.raises(ConfigurationError) as exc_info:
                config_manager.load(invalid_config_path)

            assert "yaml" in str(exc_info.value).lower()
        finally:
            os.unlink(invalid_config_path)

    def test_non_mapping_yaml_rejected(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- runner\n- verify\n")

        with pytest.raises(ConfigurationError, match="mapping"):
            AppSettings.from_yaml(path)

    def test_search_paths_without_env(self, monkeypatch):
        monkeypatch.delenv("PYRUNSHAPER_CONFIG_PATH", raising=False)
        paths = config_search_paths()

        assert paths[0].name == "config.yaml"
        assert paths[-1].parent.name == "config"

    def test_singleton_pattern(self, config_file):
        cm1 = get_config_manager()
        cm2 = get_config_manager()

        assert cm1 is cm2

        cm1.load(config_file)
        assert cm1.get_config() == cm2.get_config()


class TestConfigAccess:
    """Test configuration value access methods."""

    def test_get_with_dot_notation(self, config_file):
        config_manager = get_config_manager()
        config_manager.load(config_file)

        assert config_manager.get("runner.threads") == 2
        assert config_manager.get("gradcheck.cases") == 5

    def test_get_with_default(self, config_file):
        config_manager = get_config_manager()
        config_manager.load(config_file)

        assert config_manager.get("nonexistent.key", "default") == "default"
        assert config_manager.get_config()["gradcheck"]["cases"] == 5

    def test_convenience_properties(self, config_file):
        config_manager = get_config_manager()
        config_manager.load(config_file)

        assert config_manager.runner_threads == 2
        assert config_manager.output_dir == "experiments"
        assert config_manager.record_wall_clock is False
        assert config_manager.gradcheck.max_params_per_case == 64
        assert config_manager.verify.paired_updates == 1000
        assert config_manager.logging_config["root"]["level"] == "INFO"


class TestEnvironmentVariableOverrides:
    """Test environment variable override functionality."""

    def test_override_threads(self, config_file, monkeypatch):
        monkeypatch.setenv("PYRUNSHAPER_RUNNER__THREADS", "8")

        settings = AppSettings.from_yaml(config_file)
        assert settings.runner.threads == 8

    def test_override_boolean_value(self, config_file, monkeypatch):
        monkeypatch.setenv("PYRUNSHAPER_RUNNER__RECORD_WALL_CLOCK", "true")

        settings = AppSettings.from_yaml(config_file)
        assert settings.runner.record_wall_clock is True

    def test_runner_threads_env_wins(self, config_file, monkeypatch):
        monkeypatch.setenv("RUNNER_THREADS", "3")

        config_manager = get_config_manager()
        config_manager.load(config_file)
        assert config_manager.runner_threads == 3

    @pytest.mark.parametrize("raw", ["zero", "0", "-2"])
    def test_runner_threads_env_rejects_bad_values(self, config_file, monkeypatch, raw):
        monkeypatch.setenv("RUNNER_THREADS", raw)

        config_manager = get_config_manager()
        config_manager.load(config_file)
        with pytest.raises(ConfigurationError, match="RUNNER_THREADS"):
            config_manager.runner_threads


class TestConfigValidation:
    """Test configuration validation."""

    def test_invalid_thread_count(self, valid_config):
        valid_config['runner']['threads'] = 0
        path = _write_temp_config(valid_config)
        try:
            with pytest.raises(ConfigurationError) as exc_info:
                AppSettings.from_yaml(path)
            assert "validation" in str(exc_info.value).lower()
        finally:
            os.unlink(path)

    def test_invalid_gradcheck_step(self, valid_config):
        valid_config['gradcheck']['step'] = -1.0
        path = _write_temp_config(valid_config)
        try:
            with pytest.raises(ValueError):
                AppSettings.from_yaml(path)
        finally:
            os.unlink(path)

    def test_missing_sections_use_defaults(self):
        path = _write_temp_config({"runner": {"threads": 4}})
        try:
            settings = AppSettings.from_yaml(path)

            assert settings.runner.threads == 4
            assert settings.verify.episodes == 50_000
            assert settings.verify.seeds == list(range(10))
            assert settings.gradcheck.cases == 20
        finally:
            os.unlink(path)


class TestConfigPathSearch:
    """Test configuration file search strategy."""

    def test_env_path_beats_working_directory(self, valid_config, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        with open("config.yaml", "w") as f:
            yaml.dump(valid_config, f)

        env_config = dict(valid_config, runner={"threads": 9})
        env_path = tmp_path / "env_config.yaml"
        env_path.write_text(yaml.dump(env_config))
        monkeypatch.setenv("PYRUNSHAPER_CONFIG_PATH", str(env_path))

        config_manager = get_config_manager()
        config_manager.load()
        assert config_manager.runner_threads == 9

    def test_working_directory_config(self, valid_config, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv("PYRUNSHAPER_CONFIG_PATH", raising=False)
        with open("config.yaml", "w") as f:
            yaml.dump(valid_config, f)

        config_manager = get_config_manager()
        config_manager.load()
        assert config_manager.output_dir == "experiments"


class TestPydanticModels:
    """Test Pydantic model validation and serialization."""

    def test_runner_settings_defaults(self):
        settings = RunnerSettings()
        assert settings.threads == 1
        assert settings.record_wall_clock is False

    def test_gradcheck_settings_validation(self):
        assert GradcheckSettings(cases=3).cases == 3
        with pytest.raises(ValidationError):
            GradcheckSettings(cases=0)

    def test_verify_settings_defaults(self):
        settings = VerifySettings()
        assert settings.paired_updates >= 100_000

    def test_app_settings_serialization(self, config_file):
        settings = AppSettings.from_yaml(config_file)
        config_dict = settings.model_dump()

        assert set(config_dict) >= {"runner", "gradcheck", "verify", "logging"}


def test_initialize_system_creates_layout(tmp_path, monkeypatch, capsys):
    from pyrunshaper.config.initialize import initialize_system
    from pyrunshaper.core.harness.presets import preset_names

    config_path = _write_temp_config({"runner": {"output_dir": str(tmp_path / "runs")}})
    monkeypatch.setenv("PYRUNSHAPER_CONFIG_PATH", config_path)
    try:
        initialize_system()
    finally:
        os.unlink(config_path)

    for name in preset_names() + ["verify_pbrs"]:
        assert (tmp_path / "runs" / name).is_dir()
    assert str(tmp_path / "runs") in capsys.readouterr().out
