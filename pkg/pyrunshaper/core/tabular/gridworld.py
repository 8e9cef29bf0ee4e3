"""
Deterministic gridworld and its value-iteration oracle.

Cells are indexed row-major (``state = y * width + x``). Moving into a wall
leaves the agent in place. Every move costs ``step_reward``; any action taken
in the goal cell earns ``goal_reward`` and leads to an absorbing terminal
state (index ``width * height``) whose value and potential are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property

import numpy as np

from pyrunshaper.core.errors import ConfigurationError

GREEDY_TOLERANCE = 1e-6


class Action(IntEnum):
    """Actions in tie-break order."""
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


_MOVES = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}


@dataclass(frozen=True)
class Gridworld:
    width: int = 5
    height: int = 5
    start: tuple[int, int] = (0, 0)
    goal: tuple[int, int] = (4, 4)
    step_reward: float = -1.0
    goal_reward: float = 10.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigurationError(
                f"Grid must be at least 1x1, got {self.width}x{self.height}")
        for name, (x, y) in (("start", self.start), ("goal", self.goal)):
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise ConfigurationError(f"{name} cell {(x, y)} is outside the grid")
        if not (np.isfinite(self.step_reward) and np.isfinite(self.goal_reward)):
            raise ConfigurationError("Rewards must be finite")

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def n_states(self) -> int:
        """Cells plus the absorbing terminal state."""
        return self.n_cells + 1

    @property
    def n_actions(self) -> int:
        return len(Action)

    @property
    def terminal(self) -> int:
        return self.n_cells

    def state_of(self, cell: tuple[int, int]) -> int:
        x, y = cell
        return y * self.width + x

    def cell_of(self, state: int) -> tuple[int, int]:
        return state % self.width, state // self.width

    @property
    def start_state(self) -> int:
        return self.state_of(self.start)

    @property
    def goal_state(self) -> int:
        return self.state_of(self.goal)

    def label(self, state: int) -> str:
        if state == self.terminal:
            return "terminal"
        x, y = self.cell_of(state)
        return f"({x},{y})"

    @cached_property
    def transitions(self) -> tuple[np.ndarray, np.ndarray]:
        """``(next_state, reward)`` tables, each of shape (n_states, n_actions)."""
        next_state = np.empty((self.n_states, self.n_actions), dtype=np.int64)
        reward = np.zeros((self.n_states, self.n_actions), dtype=np.float64)
        for s in range(self.n_cells):
            x, y = self.cell_of(s)
            for a in Action:
                if s == self.goal_state:
                    next_state[s, a] = self.terminal
                    reward[s, a] = self.goal_reward
                    continue
                dx, dy = _MOVES[a]
                nx, ny = x + dx, y + dy
                if not (0 <= nx < self.width and 0 <= ny < self.height):
                    nx, ny = x, y
                next_state[s, a] = self.state_of((nx, ny))
                reward[s, a] = self.step_reward
        next_state[self.terminal, :] = self.terminal
        return next_state, reward

    def potential_with_terminal(self, phi_cells: np.ndarray) -> np.ndarray:
        """Append the terminal state's zero potential to per-cell values."""
        phi_cells = np.asarray(phi_cells, dtype=np.float64)
        if phi_cells.shape == (self.n_states,):
            if phi_cells[self.terminal] != 0.0:
                raise ConfigurationError("The terminal state's potential must be 0")
            return phi_cells.copy()
        if phi_cells.shape != (self.n_cells,):
            raise ConfigurationError(
                f"Potential needs {self.n_cells} cell values, got shape {phi_cells.shape}")
        return np.append(phi_cells, 0.0)


@dataclass(frozen=True, eq=False)
class ValueIterationResult:
    values: np.ndarray
    q: np.ndarray
    policy: np.ndarray
    iterations: int


def greedy_action(q_row: np.ndarray, tol: float = GREEDY_TOLERANCE) -> int:
    """First action (in UP, DOWN, LEFT, RIGHT order) within ``tol`` of the best."""
    best = np.max(q_row)
    return int(np.flatnonzero(q_row >= best - tol)[0])


def greedy_policy(q: np.ndarray, tol: float = GREEDY_TOLERANCE) -> np.ndarray:
    return np.array([greedy_action(row, tol) for row in q], dtype=np.int64)


def value_iteration(world: Gridworld, gamma: float, tol: float = 1e-10,
                    max_iterations: int = 100_000) -> ValueIterationResult:
    """
    Bellman-optimal values and the greedy policy with fixed tie-break.

    Args:
        world: Gridworld
        gamma: Discount in (0, 1]
        tol: Stop when no value changes by more than this
        max_iterations: Safety cap

    Returns:
        Values, Q table and greedy policy (terminal value is 0)
    """
    if not 0.0 < gamma <= 1.0:
        raise ConfigurationError(f"gamma must lie in (0, 1], got {gamma}")
    next_state, reward = world.transitions
    values = np.zeros(world.n_states)
    q = np.zeros((world.n_states, world.n_actions))
    for iteration in range(1, max_iterations + 1):
        q = reward + gamma * values[next_state]
        q[world.terminal, :] = 0.0
        updated = q.max(axis=1)
        delta = float(np.max(np.abs(updated - values)))
        values = updated
        if delta < tol:
            break
    return ValueIterationResult(values=values, q=q, policy=greedy_policy(q),
                                iterations=iteration)
