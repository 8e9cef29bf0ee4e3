"""
Tests for the biped simulator: reset, step, kinematics and mirroring.
"""

import math

import numpy as np
import pytest

from pyrunshaper.core.errors import ConfigurationError, IntegrationError
from pyrunshaper.core.sim import biped
from pyrunshaper.core.sim.biped import (
    N_JOINTS,
    SimState,
    keypoints,
    mirror,
    reset,
    rest_state,
    step,
)
from pyrunshaper.models import EnvConfig


def random_state(rng: np.random.Generator, config: EnvConfig) -> SimState:
    """Finite state within joint limits, pelvis near standing height."""
    p = biped._params(config)
    return SimState(
        pelvis_pos=np.array([rng.uniform(-1.0, 1.0),
                             config.leg_length + rng.uniform(-0.15, 0.05)]),
        pelvis_rot=float(rng.uniform(-0.3, 0.3)),
        pelvis_vel=rng.uniform(-1.0, 1.0, 2),
        pelvis_angvel=float(rng.uniform(-1.0, 1.0)),
        joint_angle=rng.uniform(p.limit_low, p.limit_high),
        joint_angvel=rng.uniform(-3.0, 3.0, N_JOINTS),
        step_index=int(rng.integers(0, 100)),
    )


class TestReset:

    def test_same_seed_is_bit_identical(self, env_config):
        assert reset(env_config, 7) == reset(env_config, 7)

    def test_different_seeds_differ_in_joint_angles(self, env_config):
        a, b = reset(env_config, 7), reset(env_config, 8)
        assert not np.array_equal(a.joint_angle, b.joint_angle)
        assert np.array_equal(a.pelvis_pos, b.pelvis_pos)

    def test_perturbation_is_small(self, env_config):
        state = reset(env_config, 3)
        assert np.all(np.abs(state.joint_angle) <= 0.01)
        assert state.step_index == 0
        assert state.pelvis_pos[1] == env_config.leg_length

    def test_zero_dt_is_configuration_error(self):
        bad = EnvConfig().model_copy(update={"dt": 0.0})
        with pytest.raises(ConfigurationError):
            reset(bad, 0)


class TestStep:

    def test_rest_state_zero_action_does_not_move(self, env_config):
        state = rest_state(env_config)
        next_state, reward, done = step(state, np.zeros(N_JOINTS), env_config)
        assert abs(next_state.pelvis_pos[0] - state.pelvis_pos[0]) < 1e-6
        assert abs(reward) < 1e-6
        assert not done

    def test_deterministic(self, env_config):
        rng = np.random.default_rng(0)
        state = random_state(rng, env_config)
        action = rng.uniform(-1, 1, N_JOINTS)
        a = step(state, action, env_config)
        b = step(state.copy(), action.copy(), env_config)
        assert a[0] == b[0]
        assert a[1] == b[1] and a[2] == b[2]

    def test_actions_are_clamped(self, env_config):
        state = reset(env_config, 1)
        big = step(state, np.full(N_JOINTS, 5.0), env_config)
        unit = step(state, np.ones(N_JOINTS), env_config)
        assert big[0] == unit[0]

    def test_joint_limits_hold(self, env_config):
        rng = np.random.default_rng(4)
        p = biped._params(env_config)
        state = reset(env_config, 0)
        for _ in range(300):
            state, _, done = step(state, rng.choice([-1.0, 1.0], N_JOINTS), env_config)
            assert np.all(state.joint_angle >= p.limit_low)
            assert np.all(state.joint_angle <= p.limit_high)
            if done:
                state = reset(env_config, int(rng.integers(1000)))

    def test_non_finite_state_raises_with_field_name(self, env_config):
        state = reset(env_config, 0)
        state.pelvis_vel = np.array([np.nan, 0.0])
        with pytest.raises(IntegrationError, match="pelvis_vel"):
            step(state, np.zeros(N_JOINTS), env_config)

    def test_non_finite_action_raises(self, env_config):
        action = np.zeros(N_JOINTS)
        action[4] = np.inf
        with pytest.raises(IntegrationError, match="l_knee"):
            step(reset(env_config, 0), action, env_config)

    def test_done_at_max_steps(self):
        config = EnvConfig(max_steps=5)
        state = reset(config, 0)
        dones = []
        for _ in range(5):
            state, _, done = step(state, np.zeros(N_JOINTS), config)
            dones.append(done)
        assert dones == [False] * 4 + [True]

    def test_done_when_pelvis_drops(self, env_config):
        state = rest_state(env_config)
        state.pelvis_pos = np.array([0.0, env_config.fall_height - 0.2])
        _, _, done = step(state, np.zeros(N_JOINTS), env_config)
        assert done

    def test_reward_decomposes_into_progress_and_effort(self, env_config):
        state = reset(env_config, 2)
        x0 = state.pelvis_pos[0]
        total, effort = 0.0, 0.0
        steps = 200
        for t in range(steps):
            action = np.sin(0.05 * t + np.arange(N_JOINTS))
            state, reward, _ = step(state, action, env_config)
            total += reward
            effort += env_config.effort_cost_coeff * np.sum(action ** 2) * env_config.dt
        assert abs(total - ((state.pelvis_pos[0] - x0) - effort)) < 1e-9 * steps

    def test_random_action_fuzz_stays_finite(self, env_config):
        rng = np.random.default_rng(11)
        state = reset(env_config, 0)
        for _ in range(10_000):
            state, _, done = step(state, rng.uniform(-1, 1, N_JOINTS), env_config)
            assert state.is_finite()
            if done:
                state = reset(env_config, int(rng.integers(10_000)))


class TestKeypoints:

    def test_straight_legs(self, env_config):
        state = rest_state(env_config)
        state.pelvis_pos = np.array([0.0, 0.0])
        kp = keypoints(state, env_config)
        thigh, shank = env_config.thigh_length, env_config.shank_length
        for knee in (kp.r_knee, kp.l_knee):
            np.testing.assert_allclose(knee, [0.0, -thigh], atol=1e-15)
        for foot in (kp.r_foot, kp.l_foot):
            np.testing.assert_allclose(foot, [0.0, -thigh - shank], atol=1e-15)

    def test_pelvis_entry_is_pelvis_position(self, env_config):
        state = reset(env_config, 5)
        assert np.array_equal(keypoints(state, env_config).pelvis, state.pelvis_pos)

    def test_right_knee_at_right_angle(self, env_config):
        state = rest_state(env_config)
        state.joint_angle[1] = math.pi / 2
        kp = keypoints(state, env_config)
        rel = kp.r_foot - kp.pelvis
        assert rel[0] == pytest.approx(env_config.shank_length)
        assert rel[1] == pytest.approx(-env_config.thigh_length)
        np.testing.assert_array_equal(kp.l_foot - kp.pelvis,
                                      [0.0, -env_config.leg_length])

    def test_matches_independent_kinematics(self, env_config):
        rng = np.random.default_rng(9)
        for _ in range(50):
            s = random_state(rng, env_config)
            kp = keypoints(s, env_config)
            for leg, (knee, foot) in enumerate(((kp.r_knee, kp.r_foot), (kp.l_knee, kp.l_foot))):
                hip, kn = s.joint_angle[3 * leg], s.joint_angle[3 * leg + 1]
                a1 = s.pelvis_rot + hip
                a2 = a1 + kn
                expected_knee = (s.pelvis_pos[0] + env_config.thigh_length * math.sin(a1),
                                 s.pelvis_pos[1] - env_config.thigh_length * math.cos(a1))
                expected_foot = (expected_knee[0] + env_config.shank_length * math.sin(a2),
                                 expected_knee[1] - env_config.shank_length * math.cos(a2))
                np.testing.assert_allclose(knee, expected_knee, atol=1e-12)
                np.testing.assert_allclose(foot, expected_foot, atol=1e-12)


class TestMirror:

    def test_involution(self, env_config):
        rng = np.random.default_rng(1)
        s = random_state(rng, env_config)
        a = rng.uniform(-1, 1, N_JOINTS)
        s2, a2 = mirror(*mirror(s, a))
        assert s2 == s
        assert np.array_equal(a2, a)

    def test_symmetric_state_is_fixed_point(self, env_config):
        s = rest_state(env_config)
        s.joint_angle = np.array([0.1, -0.2, 0.05, 0.1, -0.2, 0.05])
        m, _ = mirror(s, np.zeros(N_JOINTS))
        assert m == s

    def test_step_commutes_with_mirror(self, env_config):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(10_000):
            s = random_state(rng, env_config)
            a = rng.uniform(-1, 1, N_JOINTS)
            ms, ma = mirror(s, a)
            left, r_left, d_left = step(ms, ma, env_config)
            stepped, r_right, d_right = step(s, a, env_config)
            right, _ = mirror(stepped, a)
            worst = max(worst, float(np.max(np.abs(left.as_vector() - right.as_vector()))))
            assert abs(r_left - r_right) <= 1e-9
            assert d_left == d_right
        assert worst <= 1e-9
