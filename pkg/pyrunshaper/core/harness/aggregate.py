"""
Cross-seed aggregation of learning curves.

Standard error is the sample standard deviation (n - 1 denominator) divided
by sqrt(n); a single seed has standard error 0.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np
import pandas as pd

from pyrunshaper.core.errors import ConfigurationError
from pyrunshaper.core.storage.run_storage import RunStorage
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.utils import config_hash

logger = get_logger(__name__)

AGGREGATE_COLUMNS = ("arm", "env_steps", "n_seeds",
                     "mean_distance", "stderr_distance",
                     "mean_env_return", "stderr_env_return")


def mean_and_stderr(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Column-wise mean and standard error over seeds.

    Args:
        values: Shape (n_seeds, n_checkpoints)
    """
    n = values.shape[0]
    mean = np.mean(values, axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, np.std(values, axis=0, ddof=1) / np.sqrt(n)


def aggregate_curves(arm: str, curves: dict[int, pd.DataFrame]) -> pd.DataFrame:
    """
    Aggregate one arm's per-seed curves checkpoint by checkpoint.

    Args:
        arm: Arm name written into every row
        curves: Seed -> curve table with ``env_steps``, ``eval_mean_distance``
            and ``eval_mean_env_return`` columns

    Returns:
        Table with :data:`AGGREGATE_COLUMNS`

    Raises:
        ConfigurationError: If there are no curves or their evaluation
            schedules differ
    """
    if not curves:
        raise ConfigurationError(f"No curves to aggregate for arm {arm!r}")
    seeds = sorted(curves)
    schedule = curves[seeds[0]]["env_steps"].to_numpy()
    for seed in seeds[1:]:
        other = curves[seed]["env_steps"].to_numpy()
        if not np.array_equal(schedule, other):
            raise ConfigurationError(
                f"Arm {arm!r}: seed {seed} was evaluated at {other.tolist()}, "
                f"seed {seeds[0]} at {schedule.tolist()}")

    distance = np.stack([curves[s]["eval_mean_distance"].to_numpy(np.float64) for s in seeds])
    returns = np.stack([curves[s]["eval_mean_env_return"].to_numpy(np.float64) for s in seeds])
    mean_d, se_d = mean_and_stderr(distance)
    mean_r, se_r = mean_and_stderr(returns)
    return pd.DataFrame({
        "arm": arm,
        "env_steps": schedule,
        "n_seeds": len(seeds),
        "mean_distance": mean_d,
        "stderr_distance": se_d,
        "mean_env_return": mean_r,
        "stderr_env_return": se_r,
    }, columns=list(AGGREGATE_COLUMNS))


def aggregate_hash(curve_hashes: dict[str, dict[int, str]]) -> str:
    """Config hash of an aggregate, derived from arm -> seed -> curve hash."""
    return config_hash({arm: {str(seed): h for seed, h in sorted(seeds.items())}
                        for arm, seeds in curve_hashes.items()})


def aggregate_preset(storage: RunStorage, preset: str, arms: list[str] | None = None,
                     seeds: Iterable[int] | None = None) -> str:
    """
    Aggregate a preset's stored curves and write the result.

    Args:
        storage: Where the curves live
        preset: Preset name
        arms: Arms to include; every arm with stored curves by default
        seeds: Seeds to include; every stored seed by default. Curves of
            other seeds lying in the same directories are ignored.

    Returns:
        Location of the written aggregate

    Raises:
        ConfigurationError: If an arm has no curves among the requested seeds
    """
    arms = arms if arms is not None else storage.list_arms(preset)
    if not arms:
        raise ConfigurationError(f"No curves found for preset {preset!r}")
    seeds = None if seeds is None else sorted(set(seeds))
    tables = []
    hashes = {}
    for arm in arms:
        tables.append(aggregate_curves(arm, storage.read_curves(preset, arm, seeds)))
        hashes[arm] = storage.curve_hashes(preset, arm, seeds)
    table = pd.concat(tables, ignore_index=True)
    location = storage.write_aggregate(preset, table, aggregate_hash(hashes))
    logger.info(f"Aggregated {len(arms)} arm(s) of {preset} into {location}")
    return location
