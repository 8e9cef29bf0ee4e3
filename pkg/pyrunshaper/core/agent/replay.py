"""Fixed-capacity ring buffer of control-step transitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pyrunshaper.core.features.observation import (
    OBSERVATION_SIZE,
    Transition,
    mirror_action,
    mirror_observation,
)
from pyrunshaper.core.sim.biped import N_JOINTS


@dataclass
class Batch:
    """Column-wise view of sampled transitions."""
    obs: np.ndarray
    action: np.ndarray
    env_reward: np.ndarray
    shaping_reward: np.ndarray
    next_obs: np.ndarray
    done: np.ndarray

    def __len__(self) -> int:
        return len(self.obs)

    @classmethod
    def from_transitions(cls, transitions: list[Transition],
                         dtype: np.dtype | type = np.float32) -> 'Batch':
        return cls(
            obs=np.stack([t.obs for t in transitions]).astype(dtype),
            action=np.stack([t.action for t in transitions]).astype(dtype),
            env_reward=np.array([t.env_reward for t in transitions], dtype=dtype),
            shaping_reward=np.array([t.shaping_reward for t in transitions], dtype=dtype),
            next_obs=np.stack([t.next_obs for t in transitions]).astype(dtype),
            done=np.array([t.done for t in transitions], dtype=dtype),
        )

    def with_mirrored(self) -> 'Batch':
        """The batch followed by its left/right mirror image."""
        return Batch(
            obs=np.concatenate([self.obs, mirror_observation(self.obs)]),
            action=np.concatenate([self.action, mirror_action(self.action)]),
            env_reward=np.concatenate([self.env_reward, self.env_reward]),
            shaping_reward=np.concatenate([self.shaping_reward, self.shaping_reward]),
            next_obs=np.concatenate([self.next_obs, mirror_observation(self.next_obs)]),
            done=np.concatenate([self.done, self.done]),
        )


class ReplayBuffer:
    """
    Ring storage with a seeded uniform sampler.

    Numeric fields are stored in ``dtype`` (float32 unless the run asks for
    float64 states). Once full, the oldest transition is overwritten.
    """

    def __init__(self, capacity: int = 1_000_000, obs_dim: int = OBSERVATION_SIZE,
                 act_dim: int = N_JOINTS, dtype: np.dtype | type = np.float32,
                 seed: int = 0):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.dtype = np.dtype(dtype)
        self._obs = np.empty((capacity, obs_dim), dtype=self.dtype)
        self._action = np.empty((capacity, act_dim), dtype=self.dtype)
        self._env_reward = np.empty(capacity, dtype=self.dtype)
        self._shaping_reward = np.empty(capacity, dtype=self.dtype)
        self._next_obs = np.empty((capacity, obs_dim), dtype=self.dtype)
        self._done = np.empty(capacity, dtype=self.dtype)
        self._cursor = 0
        self._size = 0
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return self._size

    def add(self, t: Transition) -> None:
        i = self._cursor
        self._obs[i] = t.obs
        self._action[i] = t.action
        self._env_reward[i] = t.env_reward
        self._shaping_reward[i] = t.shaping_reward
        self._next_obs[i] = t.next_obs
        self._done[i] = float(t.done)
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int) -> Batch:
        """Uniform sample (with replacement) over stored transitions."""
        if self._size == 0:
            raise ValueError("Cannot sample from an empty replay buffer")
        idx = self._rng.integers(0, self._size, size=batch_size)
        return Batch(
            obs=self._obs[idx],
            action=self._action[idx],
            env_reward=self._env_reward[idx],
            shaping_reward=self._shaping_reward[idx],
            next_obs=self._next_obs[idx],
            done=self._done[idx],
        )
