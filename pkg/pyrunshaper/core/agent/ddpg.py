"""
Deterministic policy gradient agent: actor, critic, their targets and the
update rules.

The critic regresses toward ``y = (r + F) + gamma * Q'(s', mu'(s')) * (1 - done)``;
the actor follows ``dQ/da * da/dtheta`` through the critic's input gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pyrunshaper.core.agent.replay import Batch, ReplayBuffer
from pyrunshaper.core.features.observation import OBSERVATION_SIZE
from pyrunshaper.core.neural.checkpoint import load_mlp, save_mlp, write_metadata
from pyrunshaper.core.neural.mlp import ForwardCache, Head, Mlp, adam_step, soft_update
from pyrunshaper.core.sim.biped import N_JOINTS
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.models import AgentConfig

logger = get_logger(__name__)

CRITIC_SUFFIX = ".critic"


@dataclass(frozen=True)
class TrainStats:
    critic_loss: float
    actor_objective: float
    samples: int


def _seed_ints(seed: int, n: int) -> list[int]:
    """Independent integer seeds derived from one run seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


class DdpgAgent:
    """
    Actor-critic learner with target networks.

    Args:
        config: Agent configuration (topology, hyperparameters, precision)
        seed: Run seed; actor, critic and noise streams derive from it
        obs_dim: Observation width
        act_dim: Action width
    """

    def __init__(self, config: AgentConfig, seed: int = 0,
                 obs_dim: int = OBSERVATION_SIZE, act_dim: int = N_JOINTS):
        self.config = config
        self.hyper = config.hyper
        self.dtype = np.dtype(config.precision)
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        actor_seed, critic_seed, noise_seed = _seed_ints(seed, 3)
        hidden = list(config.hidden_layers)
        self.actor = Mlp([obs_dim] + hidden + [act_dim], head=Head.TANH,
                         dtype=self.dtype, seed=actor_seed)
        self.critic = Mlp([obs_dim + act_dim] + hidden + [1], head=Head.IDENTITY,
                          dtype=self.dtype, seed=critic_seed)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.noise_rng = np.random.default_rng(noise_seed)
        self.actor_calls = 0
        self.samples_trained = 0
        self.updates = 0

    def noise_sigma(self, control_step: int) -> float:
        """Exploration scale, decaying linearly to ``noise_sigma_final``."""
        h = self.hyper
        fraction = min(max(control_step, 0) / h.noise_decay_steps, 1.0)
        return h.noise_sigma + fraction * (h.noise_sigma_final - h.noise_sigma)

    def act(self, obs: np.ndarray, explore: bool = False,
            rng: np.random.Generator | None = None,
            sigma: float | None = None) -> np.ndarray:
        """
        Choose an action.

        Args:
            obs: Observation vector
            explore: Add Gaussian noise when True
            rng: Noise stream (the agent's own stream by default)
            sigma: Noise scale (``noise_sigma`` by default)

        Returns:
            float64 action in [-1, 1]
        """
        self.actor_calls += 1
        action = self.actor.forward(obs).astype(np.float64)
        if explore:
            rng = rng if rng is not None else self.noise_rng
            sigma = self.hyper.noise_sigma if sigma is None else sigma
            action = action + sigma * rng.standard_normal(action.shape)
        return np.clip(action, -1.0, 1.0)

    def q_value(self, obs: np.ndarray, action: np.ndarray,
                target: bool = False) -> np.ndarray:
        """Critic estimate for (batches of) observation/action pairs."""
        net = self.critic_target if target else self.critic
        inputs = np.concatenate([np.asarray(obs), np.asarray(action)], axis=-1)
        return net.forward(inputs)[..., 0]

    def compute_targets(self, batch: Batch) -> np.ndarray:
        """Bootstrapped critic targets for a batch."""
        next_action = self.actor_target.forward(batch.next_obs)
        next_q = self.q_value(batch.next_obs, next_action, target=True)
        reward = (batch.env_reward + batch.shaping_reward).astype(self.dtype)
        gamma = self.dtype.type(self.hyper.gamma)
        return reward + gamma * next_q * (1 - batch.done.astype(self.dtype))

    def update_critic(self, obs: np.ndarray, action: np.ndarray,
                      targets: np.ndarray) -> float:
        """One Adam step on the mean squared error to fixed targets."""
        inputs = np.concatenate([obs, action], axis=-1).astype(self.dtype)
        cache = ForwardCache()
        q = self.critic.forward(inputs, cache)
        error = q[:, 0] - targets
        loss = float(np.mean(error * error))
        upstream = (2.0 / len(error)) * error[:, None]
        grads, _ = self.critic.backward(inputs, upstream, cache)
        adam_step(self.critic, grads, self.hyper.critic_lr)
        return loss

    def update_actor(self, obs: np.ndarray) -> float:
        """One Adam step ascending the critic's value of the actor's actions."""
        obs = np.asarray(obs, dtype=self.dtype)
        actor_cache = ForwardCache()
        action = self.actor.forward(obs, actor_cache)
        inputs = np.concatenate([obs, action], axis=-1)
        critic_cache = ForwardCache()
        q = self.critic.forward(inputs, critic_cache)
        n = len(obs)
        # Minimize -mean(Q): dL/dQ = -1/n
        upstream = np.full((n, 1), -1.0 / n, dtype=self.dtype)
        _, input_grad = self.critic.backward(inputs, upstream, critic_cache)
        action_grad = input_grad[:, self.obs_dim:]
        grads, _ = self.actor.backward(obs, action_grad, actor_cache)
        adam_step(self.actor, grads, self.hyper.actor_lr)
        return float(np.mean(q))

    def train_batch(self, buffer: ReplayBuffer) -> TrainStats | None:
        """
        Sample a batch and update critic, actor and targets.

        With ``mirror_augment`` each sampled transition is trained on together
        with its mirror image.

        Returns:
            Loss statistics, or None when the buffer holds fewer than
            ``batch_size`` transitions (no update happens)
        """
        if len(buffer) < self.hyper.batch_size:
            return None
        batch = buffer.sample(self.hyper.batch_size)
        if self.config.mirror_augment:
            batch = batch.with_mirrored()
        targets = self.compute_targets(batch)
        critic_loss = self.update_critic(batch.obs, batch.action, targets)
        actor_objective = self.update_actor(batch.obs)
        soft_update(self.critic_target, self.critic, self.hyper.tau)
        soft_update(self.actor_target, self.actor, self.hyper.tau)
        self.samples_trained += len(batch)
        self.updates += 1
        return TrainStats(critic_loss, actor_objective, len(batch))

    def save(self, path: str, metadata: dict[str, object] | None = None) -> None:
        """
        Write the actor to ``path``, the critic to ``path + '.critic'`` and a
        key=value metadata sidecar.
        """
        save_mlp(self.actor, path)
        save_mlp(self.critic, path + CRITIC_SUFFIX)
        meta = {
            "actor_topology": ",".join(str(w) for w in self.actor.topology),
            "precision": self.config.precision,
            "updates": self.updates,
        }
        meta.update(metadata or {})
        write_metadata(path, meta)
        logger.debug(f"Saved agent checkpoint to {path}")


def load_actor(path: str) -> Mlp:
    """Load the policy network of a checkpoint written by :meth:`DdpgAgent.save`."""
    return load_mlp(path, head=Head.TANH)
