from pyrunshaper.core.sim.biped import (
    JOINT_NAMES,
    KEYPOINT_PARTS,
    KeypointSet,
    SimState,
    keypoints,
    mirror,
    reset,
    step,
)
from pyrunshaper.core.sim.environment import BipedEnvironment, PhysicsRecord
from pyrunshaper.core.sim.trajectory import TrajectoryLogger, read_trajectory

__all__ = [
    'JOINT_NAMES',
    'KEYPOINT_PARTS',
    'KeypointSet',
    'SimState',
    'keypoints',
    'mirror',
    'reset',
    'step',
    'BipedEnvironment',
    'PhysicsRecord',
    'TrajectoryLogger',
    'read_trajectory',
]
