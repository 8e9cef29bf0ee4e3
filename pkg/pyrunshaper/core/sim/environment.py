"""Stateful wrapper around the pure biped functions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from pyrunshaper.core.sim import biped
from pyrunshaper.core.sim.biped import KeypointSet, SimState
from pyrunshaper.core.sim.trajectory import TrajectoryLogger
from pyrunshaper.models import EnvConfig

HISTORY_LENGTH = 3


@dataclass
class PhysicsRecord:
    """Outcome of a single physics step."""
    state: SimState
    action: np.ndarray
    reward: float
    done: bool


class BipedEnvironment:
    """
    One biped episode at a time, with control-rate keypoint history.

    ``act`` applies an action for up to ``action_repeat`` physics steps
    (fewer if the episode ends) and appends the resulting keypoints to the
    history window used by the featurizer. After ``reset`` the window holds
    the initial keypoints three times.
    """

    def __init__(self, config: EnvConfig, action_repeat: int = 1,
                 trajectory_logger: TrajectoryLogger | None = None):
        if action_repeat < 1:
            raise ValueError(f"action_repeat must be >= 1, got {action_repeat}")
        self.config = biped.validate_config(config)
        self.action_repeat = action_repeat
        self.trajectory_logger = trajectory_logger
        self.state: SimState | None = None
        self.done = True
        self.control_steps = 0
        self.physics_steps = 0
        self.start_x = 0.0
        self._history: deque[KeypointSet] = deque(maxlen=HISTORY_LENGTH)

    @property
    def dt_control(self) -> float:
        return self.config.dt * self.action_repeat

    def reset(self, seed: int) -> SimState:
        self.state = biped.reset(self.config, seed)
        self.done = False
        self.control_steps = 0
        self.physics_steps = 0
        self.start_x = float(self.state.pelvis_pos[0])
        first = biped.keypoints(self.state, self.config)
        self._history.clear()
        self._history.extend([first] * HISTORY_LENGTH)
        return self.state

    def keypoints(self) -> KeypointSet:
        return self._history[-1]

    @property
    def history(self) -> tuple[KeypointSet, ...]:
        """Last three control-rate keypoint sets, oldest first."""
        return tuple(self._history)

    @property
    def distance(self) -> float:
        """Forward pelvis displacement since reset."""
        return float(self.state.pelvis_pos[0]) - self.start_x

    def step(self, action: np.ndarray) -> PhysicsRecord:
        """Single physics step; does not touch the control history."""
        if self.state is None or self.done:
            raise RuntimeError("Episode is not active; call reset() first")
        action = biped.clamp_action(action)
        next_state, reward, done = biped.step(self.state, action, self.config)
        if self.trajectory_logger is not None:
            torque = action * np.tile(self.config.torque_scale.as_tuple(), 2)
            self.trajectory_logger.record(next_state, torque, reward, done)
        self.state = next_state
        self.done = done
        self.physics_steps += 1
        return PhysicsRecord(state=next_state, action=action, reward=reward, done=done)

    def act(self, action: np.ndarray) -> list[PhysicsRecord]:
        """Apply one control action for up to ``action_repeat`` physics steps."""
        records = []
        for _ in range(self.action_repeat):
            records.append(self.step(action))
            if self.done:
                break
        self._history.append(biped.keypoints(self.state, self.config))
        self.control_steps += 1
        return records
