"""
Shared fixtures: a per-module config file with file logging, plus small
environment and agent configurations for quick training runs.
"""

import os

import pytest

from pyrunshaper.config.settings import ConfigManager
from pyrunshaper.models import AgentConfig, EnvConfig, TrainHyper


@pytest.fixture(scope="session", autouse=True)
def clear_env_vars():
    """Keep overrides exported in a developer shell out of the tests."""
    saved = {k: v for k, v in os.environ.items()
             if k.startswith("PYRUNSHAPER_") or k == "RUNNER_THREADS"}
    for key in saved:
        del os.environ[key]
    yield
    os.environ.update(saved)


@pytest.fixture(scope="module")
def test_project_dir(tmp_path_factory, request):
    return tmp_path_factory.mktemp(f"test_project_{request.module.__name__}")


@pytest.fixture(scope="module")
def config_path(test_project_dir):
    config_dir = test_project_dir / "test_config"
    config_dir.mkdir()
    return config_dir / "test_config.yaml"


@pytest.fixture(scope="module", autouse=True)
def setup_config(config_path, test_project_dir):
    """Point PYRUNSHAPER_CONFIG_PATH at a module-local config for the module's tests."""
    original_config_path = os.environ.get("PYRUNSHAPER_CONFIG_PATH")
    os.environ["PYRUNSHAPER_CONFIG_PATH"] = str(config_path)

    log_dir = test_project_dir / "logs"
    config_path.write_text(f"""
runner:
    threads: 1
    output_dir: "{test_project_dir / 'runs'}"
logging:
    version: 1
    disable_existing_loggers: false
    formatters:
        standard:
            format: "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    handlers:
        file:
            class: logging.FileHandler
            level: DEBUG
            formatter: standard
            filename: "{log_dir}/pyrunshaper.log"
    root:
        level: DEBUG
        handlers: [file]
""")

    ConfigManager.reset_instance()

    yield

    ConfigManager.reset_instance()

    if original_config_path:
        os.environ["PYRUNSHAPER_CONFIG_PATH"] = original_config_path
    else:
        os.environ.pop("PYRUNSHAPER_CONFIG_PATH", None)


@pytest.fixture
def env_config():
    """Default biped."""
    return EnvConfig()


@pytest.fixture
def short_env_config():
    """Biped with short episodes for quick rollouts."""
    return EnvConfig(max_steps=90)


@pytest.fixture
def tiny_agent_config():
    """Small networks and batches so training steps are cheap."""
    return AgentConfig(
        hidden_layers=[16, 16],
        hyper=TrainHyper(batch_size=8),
        buffer_capacity=2_000,
    )
