from pyrunshaper.core.storage.file_run_storage import (
    AGGREGATE_FILE,
    FileRunStorage,
    read_config_hash,
    read_table,
)
from pyrunshaper.core.storage.run_storage import RunStorage

__all__ = [
    'AGGREGATE_FILE',
    'FileRunStorage',
    'RunStorage',
    'read_config_hash',
    'read_table',
]
