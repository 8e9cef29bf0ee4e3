from pyrunshaper.core.features.observation import (
    MIRROR_INDEX,
    OBSERVATION_SIZE,
    Transition,
    build_observation,
    mirror_action,
    mirror_observation,
    mirror_transition,
)

__all__ = [
    'MIRROR_INDEX',
    'OBSERVATION_SIZE',
    'Transition',
    'build_observation',
    'mirror_action',
    'mirror_observation',
    'mirror_transition',
]
