"""
Tests for observation building and mirroring.
"""

import numpy as np
import pytest

from pyrunshaper.core.errors import ConfigurationError, ShapeError
from pyrunshaper.core.features.observation import (
    ACC_SLICE,
    BASE_SLICE,
    MIRROR_INDEX,
    OBSERVATION_SIZE,
    REL_SLICE,
    VEL_SLICE,
    Transition,
    build_observation,
    mirror_action,
    mirror_observation,
    mirror_transition,
)
from pyrunshaper.core.sim.biped import KeypointSet, keypoints, mirror, reset, step


def shifted(kp: KeypointSet, dx: float) -> KeypointSet:
    """Same keypoints with every part (not the pelvis) moved along x."""
    move = np.array([dx, 0.0])
    return KeypointSet(pelvis=kp.pelvis, r_knee=kp.r_knee + move,
                       l_knee=kp.l_knee + move, r_foot=kp.r_foot + move,
                       l_foot=kp.l_foot + move)


@pytest.fixture
def state(env_config):
    return reset(env_config, 3)


@pytest.fixture
def frame(state, env_config):
    return keypoints(state, env_config)


class TestBuildObservation:

    def test_constant_window_has_zero_derivatives(self, state, frame):
        obs = build_observation([frame] * 3, state, dt_control=0.03)
        assert obs.shape == (OBSERVATION_SIZE,)
        assert obs.dtype == np.float64
        np.testing.assert_array_equal(obs[REL_SLICE], frame.relative().reshape(-1))
        assert np.all(obs[VEL_SLICE] == 0.0)
        assert np.all(obs[ACC_SLICE] == 0.0)

    def test_linear_motion_gives_constant_velocity(self, state, frame):
        window = [shifted(frame, 0.0), shifted(frame, 0.1), shifted(frame, 0.2)]
        obs = build_observation(window, state, dt_control=0.03)
        np.testing.assert_allclose(obs[VEL_SLICE][0::2], 0.1 / 0.03)
        np.testing.assert_allclose(obs[VEL_SLICE][1::2], 0.0)
        np.testing.assert_allclose(obs[ACC_SLICE], 0.0, atol=1e-9)

    def test_quadratic_motion_gives_constant_acceleration(self, state, frame):
        dt = 0.03
        window = [shifted(frame, (k * dt) ** 2) for k in range(3)]
        obs = build_observation(window, state, dt_control=dt)
        np.testing.assert_allclose(obs[ACC_SLICE][0::2], 2.0, rtol=1e-6)

    def test_short_window_is_padded(self, state, frame):
        obs = build_observation([frame], state, dt_control=0.03)
        np.testing.assert_array_equal(
            obs, build_observation([frame] * 3, state, dt_control=0.03))

    def test_base_block_copies_state(self, state, frame):
        obs = build_observation([frame] * 3, state, dt_control=0.03)
        assert obs[0] == state.pelvis_rot
        np.testing.assert_array_equal(obs[4:10], state.joint_angle)

    def test_keypoint_ablation_zeroes_keypoint_blocks(self, state, frame):
        window = [shifted(frame, 0.0), shifted(frame, 0.1), frame]
        obs = build_observation(window, state, 0.03, keypoint_features=False)
        assert np.all(obs[16:] == 0.0)
        np.testing.assert_array_equal(
            obs[BASE_SLICE], build_observation(window, state, 0.03)[BASE_SLICE])

    @pytest.mark.parametrize("dt", [0.0, -0.01])
    def test_non_positive_dt_rejected(self, state, frame, dt):
        with pytest.raises(ConfigurationError):
            build_observation([frame], state, dt_control=dt)

    def test_empty_window_rejected(self, state):
        with pytest.raises(ShapeError):
            build_observation([], state, dt_control=0.03)


class TestMirroring:

    def test_mirror_index_is_a_permutation_and_involution(self):
        assert sorted(MIRROR_INDEX.tolist()) == list(range(OBSERVATION_SIZE))
        np.testing.assert_array_equal(MIRROR_INDEX[MIRROR_INDEX],
                                      np.arange(OBSERVATION_SIZE))

    def test_mirror_observation_twice_is_identity(self):
        obs = np.random.default_rng(0).normal(size=(5, OBSERVATION_SIZE))
        np.testing.assert_array_equal(mirror_observation(mirror_observation(obs)), obs)

    def test_mirror_commutes_with_featurization(self, env_config):
        rng = np.random.default_rng(5)
        states = [reset(env_config, 1)]
        for _ in range(2):
            next_state, _, _ = step(states[-1], rng.uniform(-1, 1, 6), env_config)
            states.append(next_state)
        mirrored = [mirror(s, np.zeros(6))[0] for s in states]

        obs = build_observation([keypoints(s, env_config) for s in states],
                                states[-1], 0.01)
        mirrored_obs = build_observation([keypoints(s, env_config) for s in mirrored],
                                         mirrored[-1], 0.01)
        np.testing.assert_allclose(mirror_observation(obs), mirrored_obs, atol=1e-12)

    def test_wrong_observation_size_rejected(self):
        with pytest.raises(ShapeError):
            mirror_observation(np.zeros(39))

    def test_mirror_transition_keeps_rewards(self):
        rng = np.random.default_rng(2)
        t = Transition(obs=rng.normal(size=40), action=rng.uniform(-1, 1, 6),
                       env_reward=0.5, shaping_reward=-0.25,
                       next_obs=rng.normal(size=40), done=True)
        m = mirror_transition(t)
        assert m.env_reward == 0.5 and m.shaping_reward == -0.25 and m.done
        np.testing.assert_array_equal(m.action, mirror_action(t.action))
        assert mirror_transition(m) == t
        assert t.reward == pytest.approx(0.25)


def test_transition_rejects_non_finite_reward():
    with pytest.raises(ValueError):
        Transition(obs=np.zeros(40), action=np.zeros(6), env_reward=np.nan,
                   shaping_reward=0.0, next_obs=np.zeros(40), done=False)
