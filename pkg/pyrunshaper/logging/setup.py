"""
Entry points for logging.

The CLI loads the application config and then calls :func:`setup_logging`
with its ``logging`` section. Library modules only call :func:`get_logger`;
before setup they receive a console logger at INFO so seeds trained from a
notebook or a test still report progress.
"""

from __future__ import annotations

import logging
from typing import Any

from pyrunshaper.logging.log_manager import LogManager

FALLBACK_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_manager: LogManager | None = None
_fallback_handlers: dict[str, logging.Handler] = {}


def setup_logging(logging_config: dict[str, Any]) -> None:
    """
    Apply ``logging_config`` (``dictConfig`` format).

    Only the first call per process takes effect; later calls are ignored
    until :func:`reset_logging`.
    """
    global _manager
    if _manager is not None:
        logging.getLogger(__name__).debug("Logging already set up")
        return
    _manager = LogManager.get_instance(logging_config)
    _drop_fallback_handlers()
    logging.getLogger(__name__).debug("Logging set up")


def _fallback_logger(name: str) -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(FALLBACK_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        _fallback_handlers[name] = handler
    return logger


def _drop_fallback_handlers() -> None:
    """Hand loggers created before setup back to the configured hierarchy."""
    for name, handler in _fallback_handlers.items():
        logger = logging.getLogger(name)
        logger.removeHandler(handler)
        handler.close()
        logger.setLevel(logging.NOTSET)
    _fallback_handlers.clear()


def get_logger(name: str) -> logging.Logger:
    """Named logger; see the module docstring for behaviour before setup."""
    if _manager is None:
        return _fallback_logger(name)
    return _manager.get_logger(name)


def is_logging_configured() -> bool:
    return _manager is not None


def reset_logging() -> None:
    """Forget the applied configuration (tests)."""
    global _manager
    _manager = None
    LogManager.reset_instance()
