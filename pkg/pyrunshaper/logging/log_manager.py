"""
Process-wide logging configuration.

:class:`LogManager` applies one ``logging.config.dictConfig`` dictionary per
process. File handlers may point anywhere inside an experiment output tree;
their parent directories are created before the dictionary is applied.
"""

from __future__ import annotations

import logging
import logging.config
from pathlib import Path
from typing import Any


def _make_handler_dirs(handlers: dict[str, Any]) -> None:
    for spec in handlers.values():
        if isinstance(spec, dict) and spec.get('filename'):
            Path(spec['filename']).parent.mkdir(parents=True, exist_ok=True)


class LogManager:
    """
    Singleton owning the applied logging dictionary.

    A dictionary that ``dictConfig`` rejects leaves the process on a plain
    INFO console setup plus one warning naming the problem.
    """

    _instance: LogManager | None = None

    def __init__(self, logger_settings: dict[str, Any] | None = None):
        self.logger_settings: dict[str, Any] = dict(logger_settings or {})
        if not self.logger_settings:
            return
        self.logger_settings.setdefault('version', 1)
        _make_handler_dirs(self.logger_settings.get('handlers', {}))
        try:
            logging.config.dictConfig(self.logger_settings)
        except (ValueError, TypeError, AttributeError, ImportError) as e:
            logging.basicConfig(level=logging.INFO)
            logging.getLogger(__name__).warning(
                "Ignoring invalid logging configuration: %s", e)

    @classmethod
    def get_instance(cls, logger_settings: dict[str, Any] | None = None) -> LogManager:
        """Singleton accessor; ``logger_settings`` only matters on the first call."""
        if cls._instance is None:
            cls._instance = cls(logger_settings)
        return cls._instance

    @classmethod
    def reset_instance(cls) -> None:
        cls._instance = None

    def get_logger(self, name: str) -> logging.Logger:
        return logging.getLogger(name)
