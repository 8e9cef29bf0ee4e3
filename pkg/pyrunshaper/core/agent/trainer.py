"""
Training loop: rollouts with action repeat, optional shaping, periodic
noise-free evaluation.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from pyrunshaper.core.agent.ddpg import DdpgAgent
from pyrunshaper.core.agent.replay import ReplayBuffer
from pyrunshaper.core.demo.track import load_normalized
from pyrunshaper.core.features.observation import Transition, build_observation
from pyrunshaper.core.shaping.potential import DemoPotential
from pyrunshaper.core.sim.environment import BipedEnvironment, PhysicsRecord
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.models import AgentConfig, EnvConfig

logger = get_logger(__name__)

CURVE_COLUMNS = ("run_seed", "wall_clock_s", "env_steps",
                 "eval_mean_distance", "eval_mean_env_return")
# Evaluation episodes use fixed seeds so every checkpoint sees the same starts
EVAL_SEED_BASE = 1_000_000


@dataclass
class RolloutStep:
    """One control step: the physics steps it spanned and the stored transition."""
    transition: Transition
    physics: list[PhysicsRecord]
    phi: float | None = None
    phi_next: float | None = None


@dataclass(frozen=True)
class EvalResult:
    mean_distance: float
    mean_env_return: float
    distances: tuple[float, ...]
    returns: tuple[float, ...]


@dataclass
class CurvePoint:
    run_seed: int
    wall_clock_s: float
    env_steps: int
    eval_mean_distance: float
    eval_mean_env_return: float

    def as_row(self) -> tuple:
        return (self.run_seed, self.wall_clock_s, self.env_steps,
                self.eval_mean_distance, self.eval_mean_env_return)


@dataclass
class TrainingResult:
    agent: DdpgAgent
    curve: list[CurvePoint] = field(default_factory=list)
    episodes: int = 0
    control_steps: int = 0


def observe(env: BipedEnvironment, agent_config: AgentConfig) -> np.ndarray:
    """Observation of the environment's current control state."""
    return build_observation(env.history, env.state, env.dt_control,
                             keypoint_features=agent_config.keypoint_features)


def make_potential(agent_config: AgentConfig, env_config: EnvConfig) -> DemoPotential | None:
    """Demo potential for a shaped agent, None for a baseline one."""
    shaping = agent_config.shaping
    if shaping is None:
        return None
    track = load_normalized(shaping.demo, env_config.leg_length)
    return DemoPotential(shaping.potential, track)


def rollout_step(env: BipedEnvironment, agent: DdpgAgent,
                 potential: DemoPotential | None = None, explore: bool = True,
                 sigma: float | None = None, obs: np.ndarray | None = None,
                 phi: float | None = None) -> RolloutStep:
    """
    Take one control step.

    The actor is evaluated once and its action held for up to
    ``env.action_repeat`` physics steps. The stored transition spans the
    whole control step: decision-time observation, observation after the
    last physics step and the summed environment reward. With a potential,
    ``F = gamma * phi(s') - phi(s)`` is computed at the two control states.

    Args:
        env: Active environment
        agent: Acting agent
        potential: Demo potential, or None for no shaping
        explore: Add exploration noise
        sigma: Noise scale override
        obs: Current observation if already computed
        phi: Current potential if already computed
    """
    step_index = env.control_steps
    if obs is None:
        obs = observe(env, agent.config)
    if potential is not None and phi is None:
        phi = potential(env.keypoints(), step_index)

    action = agent.act(obs, explore=explore, sigma=sigma)
    records = env.act(action)
    next_obs = observe(env, agent.config)
    env_reward = float(sum(r.reward for r in records))

    shaping = 0.0
    phi_next = None
    if potential is not None:
        phi_next = potential(env.keypoints(), step_index + 1)
        shaping = potential.shaping(phi, phi_next)

    transition = Transition(obs=obs, action=action, env_reward=env_reward,
                            shaping_reward=shaping, next_obs=next_obs, done=env.done)
    return RolloutStep(transition=transition, physics=records, phi=phi, phi_next=phi_next)


def evaluate(agent: DdpgAgent, env_config: EnvConfig, episodes: int = 3,
             seed_base: int = EVAL_SEED_BASE) -> EvalResult:
    """
    Run noise-free episodes and report distance covered and unshaped return.
    """
    env = BipedEnvironment(env_config, agent.config.action_repeat)
    distances, returns = [], []
    for i in range(episodes):
        env.reset(seed_base + i)
        total = 0.0
        obs = observe(env, agent.config)
        while not env.done:
            action = agent.actor.forward(obs).astype(np.float64)
            for record in env.act(action):
                total += record.reward
            obs = observe(env, agent.config)
        distances.append(env.distance)
        returns.append(total)
    return EvalResult(float(np.mean(distances)), float(np.mean(returns)),
                      tuple(distances), tuple(returns))


def _eval_schedule(budget: int, interval: int) -> list[int]:
    points = list(range(interval, budget + 1, interval))
    if not points or points[-1] != budget:
        points.append(budget)
    return points


def train(env_config: EnvConfig, agent_config: AgentConfig, budget: int,
          eval_interval: int, eval_episodes: int, seed: int,
          record_wall_clock: bool = False,
          on_eval: Callable[[CurvePoint], None] | None = None) -> TrainingResult:
    """
    Train one seed for ``budget`` control steps.

    Args:
        env_config: Environment configuration
        agent_config: Agent configuration (with optional shaping)
        budget: Control steps to train for
        eval_interval: Control steps between evaluations
        eval_episodes: Noise-free episodes per evaluation
        seed: Run seed
        record_wall_clock: Put real elapsed seconds in the curve (0.0 otherwise)
        on_eval: Callback invoked with each new curve point

    Returns:
        The trained agent and its learning curve
    """
    agent = DdpgAgent(agent_config, seed=seed)
    buffer_seed, episode_seed = (int(s.generate_state(1)[0]) for s in
                                 np.random.SeedSequence([seed, 1]).spawn(2))
    buffer = ReplayBuffer(agent_config.buffer_capacity, dtype=agent.dtype, seed=buffer_seed)
    potential = make_potential(agent_config, env_config)
    episode_rng = np.random.default_rng(episode_seed)
    env = BipedEnvironment(env_config, agent_config.action_repeat)

    result = TrainingResult(agent=agent)
    schedule = set(_eval_schedule(budget, eval_interval))
    started = time.perf_counter()

    env.reset(int(episode_rng.integers(2**31)))
    obs, phi = None, None
    for control_step in range(1, budget + 1):
        step = rollout_step(env, agent, potential, explore=True,
                            sigma=agent.noise_sigma(control_step - 1), obs=obs, phi=phi)
        buffer.add(step.transition)
        for _ in range(agent_config.hyper.updates_per_step):
            agent.train_batch(buffer)

        if env.done:
            result.episodes += 1
            env.reset(int(episode_rng.integers(2**31)))
            obs, phi = None, None
        else:
            obs, phi = step.transition.next_obs, step.phi_next

        if control_step in schedule:
            evaluation = evaluate(agent, env_config, eval_episodes)
            elapsed = time.perf_counter() - started if record_wall_clock else 0.0
            point = CurvePoint(seed, elapsed, control_step,
                               evaluation.mean_distance, evaluation.mean_env_return)
            result.curve.append(point)
            logger.info(
                f"seed {seed} step {control_step}: eval distance "
                f"{evaluation.mean_distance:.3f} m, return {evaluation.mean_env_return:.3f}")
            if on_eval is not None:
                on_eval(point)

    result.control_steps = budget
    return result
