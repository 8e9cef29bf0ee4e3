"""
Planar biped: state, forward kinematics and the physics step.

Generalized coordinates are the pelvis position ``(x, y)``, the pelvis
rotation and six relative joint angles ordered ``r_hip, r_knee, r_ankle,
l_hip, l_knee, l_ankle``. A segment at absolute angle ``phi`` (measured from
the downward vertical, positive toward +x) points along ``(sin phi, -cos phi)``.
The foot sits at a right angle to the shank, so a zero ankle angle puts the
toe forward.

The dynamics are a reduced-order model: each generalized coordinate has its
own constant inertia, and gravity, ground contact and joint torques enter as
generalized forces through the point Jacobians. Left and right legs are
treated by identical code, so exchanging them commutes with :func:`step`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from pyrunshaper.core.errors import ConfigurationError, IntegrationError
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.models import EnvConfig, validate_model

logger = get_logger(__name__)

JOINT_NAMES = ("r_hip", "r_knee", "r_ankle", "l_hip", "l_knee", "l_ankle")
KEYPOINT_PARTS = ("r_knee", "l_knee", "r_foot", "l_foot")
N_JOINTS = 6
# Exchanges the right and left joint triples
MIRROR_JOINTS = np.array([3, 4, 5, 0, 1, 2])


@dataclass(eq=False)
class SimState:
    """Full physical state of the biped."""
    pelvis_pos: np.ndarray
    pelvis_rot: float
    pelvis_vel: np.ndarray
    pelvis_angvel: float
    joint_angle: np.ndarray
    joint_angvel: np.ndarray
    step_index: int = 0
    # Seed the perturbation stream was drawn from; the step itself is noise-free
    rng_state: int = 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimState):
            return NotImplemented
        return (np.array_equal(self.pelvis_pos, other.pelvis_pos)
                and self.pelvis_rot == other.pelvis_rot
                and np.array_equal(self.pelvis_vel, other.pelvis_vel)
                and self.pelvis_angvel == other.pelvis_angvel
                and np.array_equal(self.joint_angle, other.joint_angle)
                and np.array_equal(self.joint_angvel, other.joint_angvel)
                and self.step_index == other.step_index
                and self.rng_state == other.rng_state)

    def as_vector(self) -> np.ndarray:
        """Numeric fields as one float64 vector of length 18."""
        return np.concatenate([
            self.pelvis_pos, [self.pelvis_rot], self.pelvis_vel,
            [self.pelvis_angvel], self.joint_angle, self.joint_angvel,
        ]).astype(np.float64)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())))

    def copy(self) -> 'SimState':
        return SimState(
            pelvis_pos=self.pelvis_pos.copy(),
            pelvis_rot=self.pelvis_rot,
            pelvis_vel=self.pelvis_vel.copy(),
            pelvis_angvel=self.pelvis_angvel,
            joint_angle=self.joint_angle.copy(),
            joint_angvel=self.joint_angvel.copy(),
            step_index=self.step_index,
            rng_state=self.rng_state,
        )


@dataclass(frozen=True, eq=False)
class KeypointSet:
    """World-frame positions of the pelvis, knees and feet (ankles)."""
    pelvis: np.ndarray
    r_knee: np.ndarray
    l_knee: np.ndarray
    r_foot: np.ndarray
    l_foot: np.ndarray

    def parts(self) -> np.ndarray:
        """Knees and feet in KEYPOINT_PARTS order, shape (4, 2)."""
        return np.stack([self.r_knee, self.l_knee, self.r_foot, self.l_foot])

    def relative(self) -> np.ndarray:
        """Knees and feet relative to the pelvis, shape (4, 2)."""
        return self.parts() - self.pelvis


@dataclass(frozen=True)
class _Params:
    """Config-derived constants used on every step."""
    dt: float
    gravity: float
    lengths: tuple[float, float, float]
    masses: tuple[float, float, float]
    total_mass: float
    inertia: np.ndarray = field(repr=False)
    torque_scale: np.ndarray = field(repr=False)
    limit_low: np.ndarray = field(repr=False)
    limit_high: np.ndarray = field(repr=False)


@lru_cache(maxsize=64)
def _params(config: EnvConfig) -> _Params:
    scale = np.tile(np.array(config.torque_scale.as_tuple(), dtype=np.float64), 2)
    limits = config.joint_limits
    low = np.tile([limits.hip.low, limits.knee.low, limits.ankle.low], 2)
    high = np.tile([limits.hip.high, limits.knee.high, limits.ankle.high], 2)
    total_mass = config.total_mass
    inertia = np.concatenate([
        [total_mass, total_mass, config.pelvis_inertia],
        np.tile(config.joint_inertia.as_tuple(), 2),
    ]).astype(np.float64)
    return _Params(
        dt=config.dt,
        gravity=config.gravity,
        lengths=(config.thigh_length, config.shank_length, config.foot_length),
        masses=(config.thigh_mass, config.shank_mass, config.foot_mass),
        total_mass=total_mass,
        inertia=inertia,
        torque_scale=scale,
        limit_low=low.astype(np.float64),
        limit_high=high.astype(np.float64),
    )


def validate_config(config: EnvConfig) -> EnvConfig:
    """
    Re-validate a config, including ones built without validation.

    Raises:
        ConfigurationError: If any field violates its constraint
    """
    if not isinstance(config, EnvConfig):
        raise ConfigurationError(
            f"Expected EnvConfig, got {type(config).__name__}")
    return validate_model(EnvConfig, config.model_dump(), "environment")


def reset(config: EnvConfig, seed: int) -> SimState:
    """
    Upright biped at the origin with seeded joint-angle perturbations.

    Args:
        config: Environment configuration
        seed: Perturbation seed; equal seeds give bit-identical states

    Returns:
        Initial SimState with step_index 0

    Raises:
        ConfigurationError: If the configuration is invalid
    """
    config = validate_config(config)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(-config.reset_noise, config.reset_noise, N_JOINTS)
    params = _params(config)
    angles = np.clip(angles, params.limit_low, params.limit_high)
    logger.debug(f"Environment reset with seed {seed}")
    return SimState(
        pelvis_pos=np.array([0.0, config.leg_length]),
        pelvis_rot=0.0,
        pelvis_vel=np.zeros(2),
        pelvis_angvel=0.0,
        joint_angle=angles,
        joint_angvel=np.zeros(N_JOINTS),
        step_index=0,
        rng_state=int(seed),
    )


def rest_state(config: EnvConfig) -> SimState:
    """Upright, motionless, unperturbed state (joint angles all zero)."""
    return SimState(
        pelvis_pos=np.array([0.0, config.leg_length]),
        pelvis_rot=0.0,
        pelvis_vel=np.zeros(2),
        pelvis_angvel=0.0,
        joint_angle=np.zeros(N_JOINTS),
        joint_angvel=np.zeros(N_JOINTS),
    )


def _direction(phi: np.ndarray) -> np.ndarray:
    """Unit vectors for absolute segment angles, shape (..., 2)."""
    return np.stack([np.sin(phi), -np.cos(phi)], axis=-1)


def _direction_derivative(phi: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


def _segment_angles(pelvis_rot: float, joint_angle: np.ndarray) -> tuple[np.ndarray, ...]:
    """Absolute thigh, shank and foot angles per leg, each shape (2,)."""
    legs = joint_angle.reshape(2, 3)
    thigh = pelvis_rot + legs[:, 0]
    shank = thigh + legs[:, 1]
    foot = shank + legs[:, 2] + np.pi / 2.0
    return thigh, shank, foot


def keypoints(state: SimState, config: EnvConfig) -> KeypointSet:
    """
    Forward kinematics for the pelvis, knees and feet.

    The foot keypoint is the ankle joint. The pelvis entry is
    ``state.pelvis_pos`` itself.
    """
    thigh, shank, _ = _segment_angles(state.pelvis_rot, state.joint_angle)
    knees = state.pelvis_pos + config.thigh_length * _direction(thigh)
    feet = knees + config.shank_length * _direction(shank)
    return KeypointSet(
        pelvis=state.pelvis_pos,
        r_knee=knees[0], l_knee=knees[1],
        r_foot=feet[0], l_foot=feet[1],
    )


def clamp_action(action: np.ndarray) -> np.ndarray:
    """Clamp a 6-vector of torque commands into [-1, 1]."""
    action = np.asarray(action, dtype=np.float64)
    if action.shape != (N_JOINTS,):
        raise IntegrationError(
            f"Action must have shape ({N_JOINTS},), got {action.shape}")
    if not np.all(np.isfinite(action)):
        bad = [JOINT_NAMES[i] for i in np.flatnonzero(~np.isfinite(action))]
        raise IntegrationError(f"Non-finite action components: {bad}")
    return np.clip(action, -1.0, 1.0)


def _check_finite(state: SimState) -> None:
    if state.is_finite():
        return
    fields = {
        "pelvis_pos": state.pelvis_pos, "pelvis_rot": state.pelvis_rot,
        "pelvis_vel": state.pelvis_vel, "pelvis_angvel": state.pelvis_angvel,
        "joint_angle": state.joint_angle, "joint_angvel": state.joint_angvel,
    }
    bad = [name for name, value in fields.items()
           if not np.all(np.isfinite(value))]
    raise IntegrationError(
        f"Non-finite simulator state at step {state.step_index}: {', '.join(bad)}")


def _chain_jacobian(offsets: tuple[float, float, float],
                    ddir: tuple[np.ndarray, np.ndarray, np.ndarray]) -> np.ndarray:
    """
    Partial derivatives of a point on each leg w.r.t. (rot, hip, knee, ankle).

    ``offsets`` are the distances travelled along thigh, shank and foot to
    reach the point. Returns shape (2 legs, 4 coords, 2 xy).
    """
    a_t, a_s, a_f = offsets
    d_t, d_s, d_f = ddir
    d_ankle = a_f * d_f
    d_knee = a_s * d_s + d_ankle
    d_hip = a_t * d_t + d_knee
    return np.stack([d_hip, d_hip, d_knee, d_ankle], axis=1)


def step(state: SimState, action: np.ndarray,
         config: EnvConfig) -> tuple[SimState, float, bool]:
    """
    Advance the biped by one physics step of length ``config.dt``.

    Args:
        state: Current state (must be finite)
        action: Six torque commands, clamped to [-1, 1]
        config: Environment configuration

    Returns:
        (next_state, reward, done) where reward is forward pelvis progress
        minus the effort cost

    Raises:
        IntegrationError: If the state or action is non-finite
    """
    _check_finite(state)
    action = clamp_action(action)
    p = _params(config)
    l_thigh, l_shank, l_foot = p.lengths
    m_thigh, m_shank, m_foot = p.masses

    thigh, shank, foot = _segment_angles(state.pelvis_rot, state.joint_angle)
    d_t, d_s, d_f = _direction(thigh), _direction(shank), _direction(foot)
    ddir = (_direction_derivative(thigh), _direction_derivative(shank),
            _direction_derivative(foot))

    ankle = state.pelvis_pos + l_thigh * d_t + l_shank * d_s
    toe = ankle + l_foot * d_f

    # Per-leg accumulators: pelvis force (2 legs, xy) and chain torques
    # (2 legs, rot/hip/knee/ankle)
    leg_force = np.zeros((2, 2))
    leg_torque = np.zeros((2, 4))

    # Gravity on the thigh, shank and foot centres of mass
    for mass, offsets in (
            (m_thigh, (l_thigh / 2.0, 0.0, 0.0)),
            (m_shank, (l_thigh, l_shank / 2.0, 0.0)),
            (m_foot, (l_thigh, l_shank, l_foot / 2.0))):
        weight = np.zeros((2, 2))
        weight[:, 1] = -mass * p.gravity
        leg_force += weight
        leg_torque += np.einsum("lcx,lx->lc", _chain_jacobian(offsets, ddir), weight)

    # Penalty contact at heel (ankle) and toe
    coords_dot = np.stack([
        np.full(2, state.pelvis_angvel),
        state.joint_angvel[[0, 3]],
        state.joint_angvel[[1, 4]],
        state.joint_angvel[[2, 5]],
    ], axis=1)
    for point, offsets in ((ankle, (l_thigh, l_shank, 0.0)),
                           (toe, (l_thigh, l_shank, l_foot))):
        jac = _chain_jacobian(offsets, ddir)
        velocity = state.pelvis_vel + np.einsum("lcx,lc->lx", jac, coords_dot)
        penetration = np.maximum(-point[:, 1], 0.0)
        in_contact = penetration > 0.0
        normal = np.where(
            in_contact,
            np.maximum(config.ground_stiffness * penetration
                       - config.ground_damping * velocity[:, 1], 0.0),
            0.0)
        limit = config.friction_coeff * normal
        tangential = np.where(
            in_contact,
            np.clip(-config.ground_tangential_damping * velocity[:, 0], -limit, limit),
            0.0)
        contact = np.stack([tangential, normal], axis=1)
        leg_force += contact
        leg_torque += np.einsum("lcx,lx->lc", jac, contact)

    # Joint actuation and damping; hip torques react on the pelvis
    joint_torque = action * p.torque_scale - config.joint_damping * state.joint_angvel
    legs_joint = joint_torque.reshape(2, 3)
    leg_torque[:, 1:] += legs_joint
    leg_torque[:, 0] -= legs_joint[:, 0]

    force_xy = leg_force[0] + leg_force[1]
    force_xy[1] -= config.pelvis_mass * p.gravity
    rot_torque = leg_torque[0, 0] + leg_torque[1, 0]
    joint_gen = np.concatenate([leg_torque[0, 1:], leg_torque[1, 1:]])

    generalized = np.concatenate([force_xy, [rot_torque], joint_gen])
    velocity = np.concatenate([state.pelvis_vel, [state.pelvis_angvel],
                               state.joint_angvel])
    velocity = velocity + p.dt * generalized / p.inertia

    velocity[0:2] = np.clip(velocity[0:2], -config.max_pelvis_speed,
                            config.max_pelvis_speed)
    velocity[2] = np.clip(velocity[2], -config.max_pelvis_angvel,
                          config.max_pelvis_angvel)
    velocity[3:] = np.clip(velocity[3:], -config.max_joint_speed,
                           config.max_joint_speed)

    pelvis_pos = state.pelvis_pos + p.dt * velocity[0:2]
    pelvis_rot = state.pelvis_rot + p.dt * velocity[2]
    joint_angle = state.joint_angle + p.dt * velocity[3:]
    joint_angvel = velocity[3:].copy()

    at_limit = (joint_angle < p.limit_low) | (joint_angle > p.limit_high)
    joint_angle = np.clip(joint_angle, p.limit_low, p.limit_high)
    joint_angvel[at_limit] = 0.0

    next_state = SimState(
        pelvis_pos=pelvis_pos,
        pelvis_rot=float(pelvis_rot),
        pelvis_vel=velocity[0:2].copy(),
        pelvis_angvel=float(velocity[2]),
        joint_angle=joint_angle,
        joint_angvel=joint_angvel,
        step_index=state.step_index + 1,
        rng_state=state.rng_state,
    )
    _check_finite(next_state)

    reward = (next_state.pelvis_pos[0] - state.pelvis_pos[0]) - effort_cost(action, config)
    done = bool(next_state.pelvis_pos[1] < config.fall_height
                or next_state.step_index >= config.max_steps)
    return next_state, float(reward), done


def effort_cost(action: np.ndarray, config: EnvConfig) -> float:
    """Effort term subtracted from the per-step reward."""
    action = np.clip(np.asarray(action, dtype=np.float64), -1.0, 1.0)
    return float(config.effort_cost_coeff * np.sum(action * action) * config.dt)


def mirror(state: SimState, action: np.ndarray) -> tuple[SimState, np.ndarray]:
    """
    Exchange the left and right legs.

    Pelvis fields are unchanged; joint angles, joint velocities and the
    action have their triples swapped. Applying it twice is the identity.
    """
    mirrored = state.copy()
    mirrored.joint_angle = state.joint_angle[MIRROR_JOINTS]
    mirrored.joint_angvel = state.joint_angvel[MIRROR_JOINTS]
    return mirrored, np.asarray(action)[MIRROR_JOINTS]
