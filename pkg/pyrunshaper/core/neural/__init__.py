from pyrunshaper.core.neural.checkpoint import load_mlp, read_metadata, save_mlp, write_metadata
from pyrunshaper.core.neural.mlp import (
    AdamState,
    ForwardCache,
    Gradients,
    Head,
    Mlp,
    adam_step,
    soft_update,
)

__all__ = [
    'AdamState',
    'ForwardCache',
    'Gradients',
    'Head',
    'Mlp',
    'adam_step',
    'soft_update',
    'load_mlp',
    'save_mlp',
    'read_metadata',
    'write_metadata',
]
