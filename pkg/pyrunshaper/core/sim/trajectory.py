"""
Per-physics-step trajectory log (CSV).

Columns: step_index, pelvis_x, pelvis_y, pelvis_rot, the six joint angles,
the six applied torques in N·m, reward and done. Values are written with 9
significant digits.
"""

from __future__ import annotations

import csv
import os
from typing import IO

import numpy as np
import pandas as pd

from pyrunshaper.core.sim.biped import JOINT_NAMES, SimState
from pyrunshaper.utils import format_decimal

TRAJECTORY_COLUMNS = (
    ["step_index", "pelvis_x", "pelvis_y", "pelvis_rot"]
    + list(JOINT_NAMES)
    + [f"torque_{name}" for name in JOINT_NAMES]
    + ["reward", "done"]
)


class TrajectoryLogger:
    """
    Streams one CSV row per physics step.

    Usable as a context manager::

        with TrajectoryLogger(path) as log:
            log.record(next_state, torque, reward, done)
    """

    def __init__(self, path: str):
        self.path = path
        self._file: IO[str] | None = None
        self._writer = None
        self.rows_written = 0

    def open(self) -> 'TrajectoryLogger':
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._file = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(TRAJECTORY_COLUMNS)
        return self

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None
            self._writer = None

    def __enter__(self) -> 'TrajectoryLogger':
        return self.open()

    def __exit__(self, *exc) -> None:
        self.close()

    def record(self, state: SimState, torque: np.ndarray, reward: float,
               done: bool) -> None:
        """
        Append one row.

        Args:
            state: State after the physics step
            torque: Applied joint torques in N·m
            reward: Step reward
            done: Episode-termination flag
        """
        if self._writer is None:
            raise RuntimeError(f"Trajectory log {self.path} is not open")
        row = [str(state.step_index),
               format_decimal(state.pelvis_pos[0]),
               format_decimal(state.pelvis_pos[1]),
               format_decimal(state.pelvis_rot)]
        row += [format_decimal(v) for v in state.joint_angle]
        row += [format_decimal(v) for v in torque]
        row += [format_decimal(reward), "1" if done else "0"]
        self._writer.writerow(row)
        self.rows_written += 1


def read_trajectory(path: str) -> pd.DataFrame:
    """Load a trajectory log written by :class:`TrajectoryLogger`."""
    frame = pd.read_csv(path)
    frame["done"] = frame["done"].astype(bool)
    return frame
