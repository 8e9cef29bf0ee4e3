"""
Tests for the logging setup.
"""

import logging

import pytest

from pyrunshaper.logging.setup import (
    get_logger,
    is_logging_configured,
    reset_logging,
    setup_logging,
)


@pytest.fixture
def fresh_logging():
    reset_logging()
    yield
    for handler in logging.getLogger().handlers[:]:
        if isinstance(handler, logging.FileHandler):
            handler.close()
            logging.getLogger().removeHandler(handler)
    reset_logging()


def test_setup_creates_log_directory_and_writes(fresh_logging, tmp_path):
    log_file = tmp_path / "nested" / "logs" / "run.log"
    setup_logging({
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"plain": {"format": "%(name)s %(levelname)s %(message)s"}},
        "handlers": {"file": {"class": "logging.FileHandler", "level": "DEBUG",
                              "formatter": "plain", "filename": str(log_file)}},
        "root": {"level": "DEBUG", "handlers": ["file"]},
    })
    assert is_logging_configured()

    get_logger("pyrunshaper.test").info("seed 3 finished")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "pyrunshaper.test INFO seed 3 finished" in log_file.read_text()


def test_setup_runs_once(fresh_logging, tmp_path):
    setup_logging({"version": 1, "root": {"level": "WARNING"}})
    setup_logging({"version": 1, "root": {"level": "DEBUG"}})
    assert logging.getLogger().level == logging.WARNING


def test_fallback_logger_before_setup(fresh_logging):
    assert not is_logging_configured()
    logger = get_logger("pyrunshaper.unconfigured_test")
    assert logger.handlers
    assert logger.level == logging.INFO


def test_setup_removes_fallback_handler(fresh_logging):
    logger = get_logger("pyrunshaper.early_module_test")
    assert len(logger.handlers) == 1

    setup_logging({"version": 1, "disable_existing_loggers": False,
                   "root": {"level": "WARNING"}})

    assert logger.handlers == []
    assert logger.getEffectiveLevel() == logging.WARNING
