import numpy as np
import pandas as pd
import pytest

from pyrunshaper.core.errors import ConfigurationError
from pyrunshaper.core.harness.aggregate import (
    AGGREGATE_COLUMNS,
    aggregate_curves,
    aggregate_preset,
    mean_and_stderr,
)
from pyrunshaper.core.storage import FileRunStorage
from pyrunshaper.core.storage.file_run_storage import read_config_hash, read_table


def curve(seed, distances, returns=None, steps=(10, 20)):
    returns = returns if returns is not None else [0.0] * len(distances)
    return pd.DataFrame({
        "run_seed": seed,
        "wall_clock_s": 0.0,
        "env_steps": list(steps),
        "eval_mean_distance": distances,
        "eval_mean_env_return": returns,
    })


def test_mean_and_stderr_two_seeds():
    mean, stderr = mean_and_stderr(np.array([[1.0], [3.0]]))
    assert mean[0] == pytest.approx(2.0)
    assert stderr[0] == pytest.approx(1.0)


def test_single_seed_has_zero_stderr():
    mean, stderr = mean_and_stderr(np.array([[1.5, 2.5]]))
    np.testing.assert_array_equal(mean, [1.5, 2.5])
    np.testing.assert_array_equal(stderr, [0.0, 0.0])


def test_aggregate_curves():
    table = aggregate_curves("shaped", {1: curve(1, [1.0, 2.0], [4.0, 0.0]),
                                        2: curve(2, [3.0, 2.0], [0.0, 0.0])})
    assert tuple(table.columns) == AGGREGATE_COLUMNS
    assert table["arm"].tolist() == ["shaped", "shaped"]
    assert table["n_seeds"].tolist() == [2, 2]
    assert table["mean_distance"].tolist() == pytest.approx([2.0, 2.0])
    assert table["stderr_distance"].tolist() == pytest.approx([1.0, 0.0])
    assert table["mean_env_return"].tolist() == pytest.approx([2.0, 0.0])


def test_mismatched_schedules_rejected():
    with pytest.raises(ConfigurationError, match="evaluated at"):
        aggregate_curves("a", {1: curve(1, [1.0, 2.0]),
                               2: curve(2, [1.0, 2.0], steps=(10, 30))})


def test_empty_input_rejected():
    with pytest.raises(ConfigurationError):
        aggregate_curves("a", {})


def test_aggregate_preset_writes_all_arms(tmp_path):
    storage = FileRunStorage(str(tmp_path))
    storage.write_curve("p", "baseline", 0, curve(0, [1.0, 1.0]), "h0")
    storage.write_curve("p", "baseline", 1, curve(1, [3.0, 1.0]), "h1")
    storage.write_curve("p", "shaped", 0, curve(0, [5.0, 6.0]), "h2")

    location = aggregate_preset(storage, "p")
    table = read_table(location)
    assert table["arm"].tolist() == ["baseline", "baseline", "shaped", "shaped"]
    assert table["mean_distance"].tolist() == pytest.approx([2.0, 1.0, 5.0, 6.0])
    assert table["stderr_distance"].tolist() == pytest.approx([1.0, 0.0, 0.0, 0.0])

    first_hash = read_config_hash(location)
    assert aggregate_preset(storage, "p") == location
    assert read_config_hash(location) == first_hash


def test_aggregate_preset_without_curves(tmp_path):
    with pytest.raises(ConfigurationError, match="No curves"):
        aggregate_preset(FileRunStorage(str(tmp_path)), "p")
