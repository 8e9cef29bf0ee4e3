"""
Filesystem implementation of RunStorage.

Layout under the base directory::

    <preset>/<arm>/seed_<n>.csv
    <preset>/aggregate.csv
    <preset>/source/source_eval.csv

Each CSV starts with a ``# config_hash=<hash>`` line. A file is only
replaced by one carrying the same hash; anything else is refused.
"""

from __future__ import annotations

import os
import re
from collections.abc import Iterable

import pandas as pd

from pyrunshaper.core.errors import OutputConflictError
from pyrunshaper.core.storage.run_storage import RunStorage
from pyrunshaper.logging.setup import get_logger

HASH_PREFIX = "# config_hash="
AGGREGATE_FILE = "aggregate.csv"
SOURCE_DIR = "source"
SOURCE_EVAL_FILE = "source_eval.csv"
_SEED_FILE = re.compile(r"^seed_(-?\d+)\.csv$")


def read_config_hash(path: str) -> str | None:
    """Hash recorded on the first line of an output file, if any."""
    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
    if first.startswith(HASH_PREFIX):
        return first[len(HASH_PREFIX):]
    return None


def read_table(path: str) -> pd.DataFrame:
    """Load an output CSV, skipping the hash line."""
    return pd.read_csv(path, comment="#", float_precision="round_trip")


class FileRunStorage(RunStorage):
    """
    File storage for per-seed curves, aggregates and source-stage outputs.
    """

    def __init__(self, base_dir: str):
        """
        Args:
            base_dir (str): Output root (``--out``)
        """
        self.logger = get_logger(__name__)
        self.base_dir = base_dir
        self.logger.debug(f"Using run storage at {self.base_dir}")

    def arm_dir(self, preset: str, arm: str) -> str:
        return os.path.join(self.base_dir, preset, arm)

    def curve_path(self, preset: str, arm: str, seed: int) -> str:
        return os.path.join(self.arm_dir(preset, arm), f"seed_{seed}.csv")

    def source_dir(self, preset: str) -> str:
        return os.path.join(self.base_dir, preset, SOURCE_DIR)

    def aggregate_path(self, preset: str) -> str:
        return os.path.join(self.base_dir, preset, AGGREGATE_FILE)

    def source_eval_path(self, preset: str) -> str:
        return os.path.join(self.source_dir(preset), SOURCE_EVAL_FILE)

    def _check_path(self, path: str, config_hash: str) -> None:
        if not os.path.exists(path):
            return
        existing = read_config_hash(path)
        if existing != config_hash:
            self.logger.error(
                f"Refusing to overwrite {path}: recorded config hash "
                f"{existing}, new run has {config_hash}")
            raise OutputConflictError(
                f"{path} was produced by a different configuration "
                f"(config_hash {existing} != {config_hash}); "
                "choose another --out directory or remove it")

    def _write_table(self, path: str, table: pd.DataFrame, config_hash: str) -> str:
        """
        Write a table behind its hash line, refusing to replace a file
        produced from a different configuration.
        """
        self._check_path(path, config_hash)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(f"{HASH_PREFIX}{config_hash}\n")
            table.to_csv(f, index=False, lineterminator="\n")
        self.logger.debug(f"Wrote {path}")
        return path

    def check_curve(self, preset: str, arm: str, seed: int, config_hash: str) -> None:
        self._check_path(self.curve_path(preset, arm, seed), config_hash)

    def check_aggregate(self, preset: str, config_hash: str) -> None:
        self._check_path(self.aggregate_path(preset), config_hash)

    def check_source_eval(self, preset: str, config_hash: str) -> None:
        self._check_path(self.source_eval_path(preset), config_hash)

    def write_curve(self, preset: str, arm: str, seed: int, curve: pd.DataFrame,
                    config_hash: str) -> str:
        return self._write_table(self.curve_path(preset, arm, seed), curve, config_hash)

    def _seed_files(self, preset: str, arm: str,
                    seeds: Iterable[int] | None = None) -> dict[int, str]:
        directory = self.arm_dir(preset, arm)
        if not os.path.isdir(directory):
            return {}
        wanted = None if seeds is None else set(seeds)
        files = {}
        for name in os.listdir(directory):
            match = _SEED_FILE.match(name)
            if match and (wanted is None or int(match.group(1)) in wanted):
                files[int(match.group(1))] = os.path.join(directory, name)
        return dict(sorted(files.items()))

    def read_curves(self, preset: str, arm: str,
                    seeds: Iterable[int] | None = None) -> dict[int, pd.DataFrame]:
        return {seed: read_table(path)
                for seed, path in self._seed_files(preset, arm, seeds).items()}

    def curve_hashes(self, preset: str, arm: str,
                     seeds: Iterable[int] | None = None) -> dict[int, str]:
        return {seed: read_config_hash(path) or ""
                for seed, path in self._seed_files(preset, arm, seeds).items()}

    def list_arms(self, preset: str) -> list[str]:
        directory = os.path.join(self.base_dir, preset)
        if not os.path.isdir(directory):
            return []
        return sorted(name for name in os.listdir(directory)
                      if name != SOURCE_DIR and self._seed_files(preset, name))

    def write_aggregate(self, preset: str, table: pd.DataFrame, config_hash: str) -> str:
        return self._write_table(self.aggregate_path(preset), table, config_hash)

    def write_source_eval(self, preset: str, table: pd.DataFrame, config_hash: str) -> str:
        return self._write_table(self.source_eval_path(preset), table, config_hash)
