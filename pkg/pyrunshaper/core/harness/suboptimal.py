"""
Demo tracks recorded from a trained policy.
"""

from __future__ import annotations

import os

import numpy as np

from pyrunshaper.core.agent.ddpg import load_actor
from pyrunshaper.core.agent.trainer import EVAL_SEED_BASE, observe
from pyrunshaper.core.demo.track import DemoTrack, save_demo
from pyrunshaper.core.errors import CheckpointError
from pyrunshaper.core.features.observation import OBSERVATION_SIZE
from pyrunshaper.core.neural.checkpoint import read_metadata
from pyrunshaper.core.sim.biped import N_JOINTS
from pyrunshaper.core.sim.environment import BipedEnvironment
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.models import AgentConfig, EnvConfig

logger = get_logger(__name__)


def _agent_from_metadata(checkpoint: str) -> AgentConfig:
    """Observation-relevant settings recorded next to a checkpoint."""
    meta = read_metadata(checkpoint)
    values = {}
    if "action_repeat" in meta:
        values["action_repeat"] = int(meta["action_repeat"])
    if "keypoint_features" in meta:
        values["keypoint_features"] = meta["keypoint_features"].lower() == "true"
    return AgentConfig(**values)


def make_suboptimal_demo(checkpoint: str, env_config: EnvConfig, out: str,
                         episodes: int = 3, agent_config: AgentConfig | None = None,
                         seed_base: int = EVAL_SEED_BASE) -> DemoTrack:
    """
    Roll out a checkpointed policy without noise and write its best episode
    as a demo track.

    Each control step of the episode that covers the most distance becomes
    one frame of pelvis-relative knee and foot positions; the reset pose is
    frame 0.

    Args:
        checkpoint: Actor checkpoint written by ``DdpgAgent.save``
        env_config: Environment to roll out in
        out: Demo CSV to write
        episodes: Rollouts to choose the best from
        agent_config: Observation settings; read from the checkpoint's
            metadata sidecar when omitted
        seed_base: Seed of the first rollout

    Returns:
        The written track

    Raises:
        CheckpointError: If the checkpoint cannot be read or its topology
            does not fit the environment's observation and action sizes
        InsufficientDemoError: If the best episode is shorter than a gait cycle
    """
    actor = load_actor(checkpoint)
    if actor.topology[0] != OBSERVATION_SIZE or actor.topology[-1] != N_JOINTS:
        raise CheckpointError(
            f"{checkpoint} maps {actor.topology[0]} inputs to {actor.topology[-1]} "
            f"outputs; the biped needs {OBSERVATION_SIZE} -> {N_JOINTS}")
    agent_config = agent_config or _agent_from_metadata(checkpoint)
    env = BipedEnvironment(env_config, agent_config.action_repeat)

    best_frames: list[np.ndarray] = []
    best_distance = -np.inf
    for i in range(episodes):
        env.reset(seed_base + i)
        frames = [env.keypoints().relative()]
        while not env.done:
            obs = observe(env, agent_config)
            env.act(actor.forward(obs).astype(np.float64))
            frames.append(env.keypoints().relative())
        logger.debug(f"Source rollout {i}: distance {env.distance:.3f} m, {len(frames)} frames")
        if env.distance > best_distance:
            best_distance, best_frames = env.distance, frames

    track = DemoTrack(
        frame_index=np.arange(len(best_frames)),
        positions=np.stack(best_frames),
        cadence_s=env.dt_control,
        source=f"policy:{os.path.basename(checkpoint)}",
    )
    save_demo(track, out, comment=f"Recorded from {checkpoint}, best of {episodes} episodes")
    logger.info(f"Wrote {len(track)}-frame demo from {checkpoint} "
                f"(distance {best_distance:.3f} m) to {out}")
    return track
