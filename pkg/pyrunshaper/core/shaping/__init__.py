from pyrunshaper.core.shaping.potential import (
    DemoPotential,
    part_potential,
    shaping_reward,
    state_potential,
)

__all__ = ['DemoPotential', 'part_potential', 'shaping_reward', 'state_potential']
