from pyrunshaper.core.harness.aggregate import (
    AGGREGATE_COLUMNS,
    aggregate_curves,
    aggregate_hash,
    aggregate_preset,
    mean_and_stderr,
)
from pyrunshaper.core.harness.presets import (
    PRESETS,
    load_experiment_config,
    preset,
    preset_names,
)
from pyrunshaper.core.harness.runner import ExperimentRunner, RunSummary, run_experiment
from pyrunshaper.core.harness.suboptimal import make_suboptimal_demo

__all__ = [
    'AGGREGATE_COLUMNS',
    'aggregate_curves',
    'aggregate_hash',
    'aggregate_preset',
    'mean_and_stderr',
    'PRESETS',
    'load_experiment_config',
    'preset',
    'preset_names',
    'ExperimentRunner',
    'RunSummary',
    'run_experiment',
    'make_suboptimal_demo',
]
