import numpy as np
import pytest

from pyrunshaper.core.demo.track import load_demo
from pyrunshaper.core.errors import CheckpointError
from pyrunshaper.core.features.observation import OBSERVATION_SIZE
from pyrunshaper.core.harness.suboptimal import make_suboptimal_demo
from pyrunshaper.core.neural.checkpoint import save_mlp, write_metadata
from pyrunshaper.core.neural.mlp import Head, Mlp
from pyrunshaper.core.sim.biped import N_JOINTS, keypoints, reset
from pyrunshaper.models import AgentConfig, EnvConfig


def zero_actor(inputs=OBSERVATION_SIZE, outputs=N_JOINTS):
    weights = [np.zeros((inputs, 8), np.float32), np.zeros((8, outputs), np.float32)]
    biases = [np.zeros(8, np.float32), np.zeros(outputs, np.float32)]
    return Mlp.from_parameters(weights, biases, Head.TANH)


@pytest.fixture
def weightless_env():
    return EnvConfig(gravity=0.0, reset_noise=0.0, max_steps=60)


@pytest.fixture
def checkpoint(tmp_path):
    path = str(tmp_path / "actor.mlp")
    save_mlp(zero_actor(), path)
    return path


def test_idle_policy_records_identical_frames(checkpoint, weightless_env, tmp_path):
    out = str(tmp_path / "demo.csv")
    track = make_suboptimal_demo(checkpoint, weightless_env, out, episodes=2,
                                 agent_config=AgentConfig(action_repeat=3))
    assert len(track) == 21
    np.testing.assert_allclose(track.positions, track.positions[:1].repeat(21, axis=0))
    expected = keypoints(reset(weightless_env, 0), weightless_env).relative()
    np.testing.assert_allclose(track.positions[0], expected)
    assert track.cadence_s == pytest.approx(0.03)
    assert track.source == "policy:actor.mlp"


def test_written_track_loads_back(checkpoint, weightless_env, tmp_path):
    out = str(tmp_path / "demo.csv")
    track = make_suboptimal_demo(checkpoint, weightless_env, out, episodes=1)
    loaded = load_demo(out)
    assert len(loaded) == len(track)
    np.testing.assert_allclose(loaded.positions, track.positions, atol=1e-9)


def test_action_repeat_from_metadata(checkpoint, weightless_env, tmp_path):
    write_metadata(checkpoint, {"action_repeat": 2, "keypoint_features": True})
    track = make_suboptimal_demo(checkpoint, weightless_env, str(tmp_path / "d.csv"),
                                 episodes=1)
    assert len(track) == 31
    assert track.cadence_s == pytest.approx(0.02)


def test_topology_mismatch(tmp_path, weightless_env):
    path = str(tmp_path / "wrong.mlp")
    save_mlp(zero_actor(inputs=12), path)
    with pytest.raises(CheckpointError, match="12"):
        make_suboptimal_demo(path, weightless_env, str(tmp_path / "d.csv"))


def test_missing_checkpoint(tmp_path, weightless_env):
    with pytest.raises(CheckpointError):
        make_suboptimal_demo(str(tmp_path / "none.mlp"), weightless_env,
                             str(tmp_path / "d.csv"))
