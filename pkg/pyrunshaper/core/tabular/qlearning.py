"""
Tabular Q-learning with an additive shaping term.

The update is ``Q[s, a] += alpha * (r + F + gamma * max_b Q[s', b] - Q[s, a])``;
plain Q-learning is the ``F = 0`` case and runs through the same kernel.
Episode loops are compiled with numba and draw from numba's own seeded
generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from pyrunshaper.core.tabular.gridworld import GREEDY_TOLERANCE, Gridworld

ALPHA = 0.08
GAMMA = 0.9
EPSILON_START = 1.0
EPSILON_END = 0.01
EPSILON_DECAY_FRACTION = 0.8
MAX_EPISODE_STEPS = 500


@njit(cache=True)
def _td_update(q, s, a, r, s_next, alpha, gamma, f):
    best = q[s_next, 0]
    for b in range(1, q.shape[1]):
        if q[s_next, b] > best:
            best = q[s_next, b]
    q[s, a] += alpha * (r + f + gamma * best - q[s, a])


@njit(cache=True)
def _greedy(row, tol):
    best = row[0]
    for b in range(1, row.shape[0]):
        if row[b] > best:
            best = row[b]
    for b in range(row.shape[0]):
        if row[b] >= best - tol:
            return b
    return 0


@njit(cache=True)
def _run_episodes(q, next_state, reward, phi, start, terminal, first_episode,
                  n_episodes, total_episodes, alpha, gamma, eps_start, eps_end,
                  decay_fraction, max_steps, seed, shaped, tol):
    np.random.seed(seed)
    n_actions = q.shape[1]
    decay_episodes = max(decay_fraction * total_episodes, 1.0)
    steps = 0
    for episode in range(first_episode, first_episode + n_episodes):
        progress = min(episode / decay_episodes, 1.0)
        eps = eps_start + progress * (eps_end - eps_start)
        s = start
        for _ in range(max_steps):
            if np.random.random() < eps:
                a = np.random.randint(0, n_actions)
            else:
                a = _greedy(q[s], tol)
            s_next = next_state[s, a]
            f = 0.0
            if shaped:
                f = gamma * phi[s_next] - phi[s]
            _td_update(q, s, a, reward[s, a], s_next, alpha, gamma, f)
            steps += 1
            s = s_next
            if s == terminal:
                break
    return steps


def q_update(q: np.ndarray, s: int, a: int, r: float, s_next: int,
             alpha: float = ALPHA, gamma: float = GAMMA, f: float = 0.0) -> np.ndarray:
    """
    Update one cell of ``q`` in place and return it.

    Args:
        q: Q table, shape (n_states, n_actions), float64
        s, a: State and action being updated
        r: Environment reward
        s_next: Successor state
        alpha: Learning rate in (0, 1]
        gamma: Discount
        f: Shaping reward (0 for plain Q-learning)
    """
    _td_update(q, s, a, float(r), s_next, float(alpha), float(gamma), float(f))
    return q


def init_q_table(world: Gridworld, phi: np.ndarray | None = None) -> np.ndarray:
    """
    Zero Q table, or ``Q0[s, a] = phi(s)`` when a potential is given.
    """
    q = np.zeros((world.n_states, world.n_actions), dtype=np.float64)
    if phi is not None:
        q += world.potential_with_terminal(phi)[:, None]
    return q


@dataclass(frozen=True)
class LearnerSchedule:
    """Exploration and step-size settings for one Q-learning run."""
    alpha: float = ALPHA
    gamma: float = GAMMA
    eps_start: float = EPSILON_START
    eps_end: float = EPSILON_END
    decay_fraction: float = EPSILON_DECAY_FRACTION
    max_steps: int = MAX_EPISODE_STEPS


def train_episodes(q: np.ndarray, world: Gridworld, phi: np.ndarray | None,
                   first_episode: int, n_episodes: int, total_episodes: int,
                   seed: int, schedule: LearnerSchedule = LearnerSchedule()) -> int:
    """
    Run ``n_episodes`` of epsilon-greedy Q-learning in place.

    Epsilon decays linearly from ``eps_start`` to ``eps_end`` over the first
    ``decay_fraction`` of ``total_episodes``, so a run split into chunks
    follows the same schedule as an unsplit one.

    Args:
        q: Q table to update
        world: Gridworld
        phi: Per-cell potential for shaping, or None for plain Q-learning
        first_episode: Index of the first episode in this chunk
        n_episodes: Episodes in this chunk
        total_episodes: Episodes in the whole run
        seed: Seed for this chunk's action/exploration stream
        schedule: Step size, discount and exploration settings

    Returns:
        Number of updates performed
    """
    next_state, reward = world.transitions
    shaped = phi is not None
    phi_full = (world.potential_with_terminal(phi) if shaped
                else np.zeros(world.n_states))
    return int(_run_episodes(
        q, next_state, reward, phi_full, world.start_state, world.terminal,
        first_episode, n_episodes, total_episodes, schedule.alpha, schedule.gamma,
        schedule.eps_start, schedule.eps_end, schedule.decay_fraction,
        schedule.max_steps, seed, shaped, GREEDY_TOLERANCE))


@njit(cache=True)
def _paired_updates(q_init, q_shaped, next_state, reward, phi, n_cells, updates,
                    alpha, gamma, seed):
    np.random.seed(seed)
    n_actions = q_init.shape[1]
    worst = 0.0
    for _ in range(updates):
        s = np.random.randint(0, n_cells)
        a = np.random.randint(0, n_actions)
        s_next = next_state[s, a]
        r = reward[s, a]
        _td_update(q_init, s, a, r, s_next, alpha, gamma, 0.0)
        _td_update(q_shaped, s, a, r, s_next, alpha, gamma,
                   gamma * phi[s_next] - phi[s])
        for i in range(q_init.shape[0]):
            for b in range(n_actions):
                gap = abs(q_shaped[i, b] - (q_init[i, b] - phi[i]))
                if gap > worst:
                    worst = gap
    return worst


def paired_initialization_check(world: Gridworld, phi: np.ndarray, updates: int,
                                seed: int, alpha: float = ALPHA,
                                gamma: float = GAMMA) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Drive a potential-initialized plain learner and a zero-initialized shaped
    learner with one shared random experience stream.

    Returns:
        (largest ``|Q_shaped - (Q_init - phi)|`` seen after any update,
        final Q_init, final Q_shaped)
    """
    next_state, reward = world.transitions
    phi_full = world.potential_with_terminal(phi)
    q_init = init_q_table(world, phi)
    q_shaped = init_q_table(world)
    worst = _paired_updates(q_init, q_shaped, next_state, reward, phi_full,
                            world.n_cells, updates, alpha, gamma, seed)
    return float(worst), q_init, q_shaped
