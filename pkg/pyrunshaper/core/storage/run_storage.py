"""
Abstract interface for experiment output storage.

Every file a run produces (per-seed learning curves, aggregates, the
suboptimal-source evaluation) passes through a RunStorage so the harness
never touches paths directly.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable

import pandas as pd


class RunStorage(ABC):
    """Abstract interface for run outputs."""

    @abstractmethod
    def write_curve(self, preset: str, arm: str, seed: int, curve: pd.DataFrame,
                    config_hash: str) -> str:
        """Store one seed's learning curve; returns its location."""
        pass

    @abstractmethod
    def read_curves(self, preset: str, arm: str,
                    seeds: Iterable[int] | None = None) -> dict[int, pd.DataFrame]:
        """Fetch an arm's seed curves keyed by seed, all of them or only ``seeds``."""
        pass

    @abstractmethod
    def curve_hashes(self, preset: str, arm: str,
                     seeds: Iterable[int] | None = None) -> dict[int, str]:
        """Fetch the config hash recorded in an arm's seed curves."""
        pass

    @abstractmethod
    def list_arms(self, preset: str) -> list[str]:
        """Arms of a preset that have at least one stored curve."""
        pass

    @abstractmethod
    def write_aggregate(self, preset: str, table: pd.DataFrame, config_hash: str) -> str:
        """Store the cross-seed aggregate of a preset; returns its location."""
        pass

    @abstractmethod
    def write_source_eval(self, preset: str, table: pd.DataFrame, config_hash: str) -> str:
        """Store the suboptimal-source policy evaluation; returns its location."""
        pass

    @abstractmethod
    def source_dir(self, preset: str) -> str:
        """Location for source-stage artifacts (checkpoint, derived demo)."""
        pass

    def check_curve(self, preset: str, arm: str, seed: int, config_hash: str) -> None:
        """Raise OutputConflictError if the curve may not be written with this hash."""

    def check_aggregate(self, preset: str, config_hash: str) -> None:
        """Raise OutputConflictError if the aggregate may not be written with this hash."""

    def check_source_eval(self, preset: str, config_hash: str) -> None:
        """Raise OutputConflictError if the source evaluation may not be written."""
