import os

from pyrunshaper.config.settings import get_config_manager
from pyrunshaper.core.harness.presets import preset_names


def initialize_system():
    """Create the output directory layout named in the configuration."""
    config_manager = get_config_manager()
    config_manager.load()  # Ensure config is loaded

    base_dir = config_manager.output_dir
    os.makedirs(base_dir, exist_ok=True)
    for name in preset_names():
        os.makedirs(os.path.join(base_dir, name), exist_ok=True)
    os.makedirs(os.path.join(base_dir, "verify_pbrs"), exist_ok=True)
    print(f"Run output directory initialized at {base_dir} "
          f"({config_manager.runner_threads} worker thread(s)).")
