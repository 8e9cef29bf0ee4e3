"""
Observation vectors and mirrored transitions.

Layout of the 40-value observation:

=========  =====  =====================================================
slice      size   content
=========  =====  =====================================================
0:4        4      pelvis rotation, pelvis velocity (x, y), angular velocity
4:10       6      joint angles (r_hip, r_knee, r_ankle, l_hip, l_knee, l_ankle)
10:16      6      joint angular velocities
16:24      8      r_knee, l_knee, r_foot, l_foot relative to the pelvis (x, y)
24:32      8      backward-difference velocities of the same points
32:40      8      second backward-difference accelerations
=========  =====  =====================================================
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from pyrunshaper.core.errors import ConfigurationError, ShapeError
from pyrunshaper.core.sim.biped import MIRROR_JOINTS, KeypointSet, SimState

OBSERVATION_SIZE = 40
BASE_SLICE = slice(0, 16)
REL_SLICE = slice(16, 24)
VEL_SLICE = slice(24, 32)
ACC_SLICE = slice(32, 40)

# r_knee <-> l_knee, r_foot <-> l_foot within one 8-value keypoint block
_KEYPOINT_MIRROR = np.array([2, 3, 0, 1, 6, 7, 4, 5])

MIRROR_INDEX = np.concatenate([
    np.arange(4),
    4 + MIRROR_JOINTS,
    10 + MIRROR_JOINTS,
    16 + _KEYPOINT_MIRROR,
    24 + _KEYPOINT_MIRROR,
    32 + _KEYPOINT_MIRROR,
])


@dataclass(frozen=True, eq=False)
class Transition:
    """One control-step experience record."""
    obs: np.ndarray
    action: np.ndarray
    env_reward: float
    shaping_reward: float
    next_obs: np.ndarray
    done: bool

    def __post_init__(self):
        if self.obs.shape != self.next_obs.shape:
            raise ShapeError(
                f"obs and next_obs differ in shape: {self.obs.shape} vs "
                f"{self.next_obs.shape}")
        if not (np.isfinite(self.env_reward) and np.isfinite(self.shaping_reward)):
            raise ValueError(
                f"Transition rewards must be finite, got env={self.env_reward} "
                f"shaping={self.shaping_reward}")

    @property
    def reward(self) -> float:
        """Reward the learner trains on."""
        return self.env_reward + self.shaping_reward

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transition):
            return NotImplemented
        return (np.array_equal(self.obs, other.obs)
                and np.array_equal(self.action, other.action)
                and self.env_reward == other.env_reward
                and self.shaping_reward == other.shaping_reward
                and np.array_equal(self.next_obs, other.next_obs)
                and self.done == other.done)


def build_observation(window: Sequence[KeypointSet], state: SimState,
                      dt_control: float, keypoint_features: bool = True) -> np.ndarray:
    """
    Build the observation for the current control step.

    Args:
        window: Recent keypoint sets, oldest first, the last one being the
            current state's. Fewer than three are padded by repeating the
            first frame.
        state: Current simulator state
        dt_control: Time between control steps in seconds
        keypoint_features: When False the keypoint blocks are zero (ablation)

    Returns:
        float64 vector of length 40

    Raises:
        ConfigurationError: If dt_control is not positive
        ShapeError: If the window is empty
    """
    if not dt_control > 0.0:
        raise ConfigurationError(f"dt_control must be positive, got {dt_control}")
    if len(window) == 0:
        raise ShapeError("Keypoint window needs at least one frame")

    frames = list(window)[-3:]
    while len(frames) < 3:
        frames.insert(0, frames[0])

    obs = np.zeros(OBSERVATION_SIZE, dtype=np.float64)
    obs[0] = state.pelvis_rot
    obs[1:3] = state.pelvis_vel
    obs[3] = state.pelvis_angvel
    obs[4:10] = state.joint_angle
    obs[10:16] = state.joint_angvel

    if keypoint_features:
        oldest, previous, current = (f.relative().reshape(-1) for f in frames)
        obs[REL_SLICE] = current
        obs[VEL_SLICE] = (current - previous) / dt_control
        obs[ACC_SLICE] = (current - 2.0 * previous + oldest) / (dt_control * dt_control)
    return obs


def mirror_observation(obs: np.ndarray) -> np.ndarray:
    """Swap left and right blocks of an observation (or a batch of them)."""
    obs = np.asarray(obs)
    if obs.shape[-1] != OBSERVATION_SIZE:
        raise ShapeError(
            f"Observation must have {OBSERVATION_SIZE} values, got {obs.shape[-1]}")
    return obs[..., MIRROR_INDEX]


def mirror_action(action: np.ndarray) -> np.ndarray:
    """Swap the right and left torque triples (works on batches)."""
    return np.asarray(action)[..., MIRROR_JOINTS]


def mirror_transition(t: Transition) -> Transition:
    """Mirror observations and action; rewards and done are unchanged."""
    return Transition(
        obs=mirror_observation(t.obs),
        action=mirror_action(t.action),
        env_reward=t.env_reward,
        shaping_reward=t.shaping_reward,
        next_obs=mirror_observation(t.next_obs),
        done=t.done,
    )
