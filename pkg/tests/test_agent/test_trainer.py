"""
Tests for rollouts, evaluation and the training loop (tiny budgets).
"""

import numpy as np
import pytest

from pyrunshaper.core.agent import DdpgAgent, evaluate, observe, rollout_step, train
from pyrunshaper.core.agent.trainer import CURVE_COLUMNS, _eval_schedule, make_potential
from pyrunshaper.core.sim import BipedEnvironment
from pyrunshaper.models import ShapingConfig


@pytest.fixture
def shaped_agent_config(tiny_agent_config):
    return tiny_agent_config.model_copy(update={"shaping": ShapingConfig(demo="game")})


def test_eval_schedule():
    assert _eval_schedule(10, 4) == [4, 8, 10]
    assert _eval_schedule(8, 4) == [4, 8]
    assert _eval_schedule(3, 5) == [3]


def test_make_potential(tiny_agent_config, shaped_agent_config, env_config):
    assert make_potential(tiny_agent_config, env_config) is None
    potential = make_potential(shaped_agent_config, env_config)
    assert len(potential.track) == 12
    assert potential.gamma == shaped_agent_config.hyper.gamma


def test_rollout_step_spans_action_repeat(short_env_config, tiny_agent_config):
    env = BipedEnvironment(short_env_config, action_repeat=3)
    env.reset(0)
    agent = DdpgAgent(tiny_agent_config, seed=0)
    obs = observe(env, tiny_agent_config)
    step = rollout_step(env, agent, explore=False)

    assert len(step.physics) == 3
    np.testing.assert_array_equal(step.transition.obs, obs)
    np.testing.assert_array_equal(step.transition.action, agent.act(obs))
    assert step.transition.env_reward == pytest.approx(sum(r.reward for r in step.physics))
    assert step.transition.shaping_reward == 0.0
    assert agent.actor_calls == 2


def test_discounted_shaping_telescopes_over_an_episode(short_env_config,
                                                       shaped_agent_config):
    env = BipedEnvironment(short_env_config, action_repeat=3)
    env.reset(5)
    agent = DdpgAgent(shaped_agent_config, seed=5)
    potential = make_potential(shaped_agent_config, short_env_config)
    gamma = potential.gamma

    shaping, phis = [], []
    obs, phi = None, None
    while not env.done:
        step = rollout_step(env, agent, potential, explore=True, obs=obs, phi=phi)
        if not phis:
            phis.append(step.phi)
        shaping.append(step.transition.shaping_reward)
        phis.append(step.phi_next)
        obs, phi = step.transition.next_obs, step.phi_next

    discounted = sum(gamma ** k * f for k, f in enumerate(shaping))
    expected = gamma ** len(shaping) * phis[-1] - phis[0]
    assert discounted == pytest.approx(expected, abs=1e-9 * len(shaping))


def test_evaluate_is_deterministic(short_env_config, tiny_agent_config):
    agent = DdpgAgent(tiny_agent_config, seed=1)
    a = evaluate(agent, short_env_config, episodes=2)
    b = evaluate(agent, short_env_config, episodes=2)
    assert a == b
    assert len(a.distances) == 2
    assert a.mean_distance == pytest.approx(np.mean(a.distances))


def test_train_produces_curve_on_schedule(short_env_config, tiny_agent_config):
    seen = []
    result = train(short_env_config, tiny_agent_config, budget=50, eval_interval=20,
                   eval_episodes=1, seed=3, on_eval=seen.append)
    assert [p.env_steps for p in result.curve] == [20, 40, 50]
    assert seen == result.curve
    assert all(p.wall_clock_s == 0.0 for p in result.curve)
    assert result.episodes >= 1
    assert result.agent.updates > 0
    assert len(result.curve[0].as_row()) == len(CURVE_COLUMNS)


def test_train_same_seed_same_curve(short_env_config, shaped_agent_config):
    kwargs = dict(budget=30, eval_interval=15, eval_episodes=1, seed=8)
    a = train(short_env_config, shaped_agent_config, **kwargs)
    b = train(short_env_config, shaped_agent_config, **kwargs)
    assert [p.as_row() for p in a.curve] == [p.as_row() for p in b.curve]


def test_wall_clock_recorded_on_request(short_env_config, tiny_agent_config):
    result = train(short_env_config, tiny_agent_config, budget=10, eval_interval=10,
                   eval_episodes=1, seed=0, record_wall_clock=True)
    assert result.curve[0].wall_clock_s > 0.0
