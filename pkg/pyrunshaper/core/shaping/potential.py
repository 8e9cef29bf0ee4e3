"""
Inverse-distance potentials over body parts and the potential-based
shaping reward ``F(s, s') = gamma * phi(s') - phi(s)``.

Both sides of every distance are pelvis-relative, so a potential does not
depend on how far along the track the biped has travelled.
"""

from __future__ import annotations

import math

import numpy as np

from pyrunshaper.core.demo.track import DemoFrame, DemoTrack, phase_lookup
from pyrunshaper.core.errors import ShapingContractError
from pyrunshaper.core.sim.biped import KeypointSet
from pyrunshaper.models import PotentialConfig, PotentialKind


def part_potential(dx: float, dy: float, kind: PotentialKind | str,
                   epsilon: float) -> float:
    """
    Potential of a single body part.

    Args:
        dx: Absolute horizontal distance to the target (>= 0)
        dy: Absolute vertical distance to the target (>= 0)
        kind: PF1 (``1/(dx+dy)``), PF2 (``1/sqrt(dx²+dy²)``) or PF3
            (``1/(dx²+dy²)``)
        epsilon: Lower clamp on every denominator

    Returns:
        Strictly positive, finite potential (at most ``1/epsilon``)

    Raises:
        ShapingContractError: If dx or dy is negative or not finite
    """
    if not (dx >= 0.0 and dy >= 0.0) or math.isinf(dx) or math.isinf(dy):
        raise ShapingContractError(
            f"part_potential needs non-negative finite distances, got dx={dx}, dy={dy}")
    if not epsilon > 0.0:
        raise ShapingContractError(f"epsilon must be positive, got {epsilon}")
    kind = PotentialKind(kind)
    if kind is PotentialKind.PF1:
        denominator = dx + dy
    elif kind is PotentialKind.PF2:
        denominator = math.hypot(dx, dy)
    else:
        denominator = dx * dx + dy * dy
    return 1.0 / max(denominator, epsilon)


def state_potential(agent: KeypointSet, target: DemoFrame,
                    cfg: PotentialConfig) -> float:
    """
    Weighted sum of part potentials between agent and demo keypoints.

    Args:
        agent: World-frame agent keypoints (differenced pelvis-relative)
        target: Pelvis-relative demo frame
        cfg: Potential settings

    Returns:
        phi for the agent state
    """
    deltas = np.abs(agent.relative() - target.parts())
    phi = 0.0
    for weight, (dx, dy) in zip(cfg.part_weights, deltas):
        phi += weight * part_potential(float(dx), float(dy), cfg.kind, cfg.epsilon)
    if cfg.pelvis_height_weight > 0.0:
        dh = abs(float(agent.pelvis[1]) - cfg.pelvis_target_height)
        phi += cfg.pelvis_height_weight * part_potential(0.0, dh, cfg.kind, cfg.epsilon)
    return phi


def shaping_reward(phi_s: float, phi_s_next: float, gamma: float) -> float:
    """``gamma * phi(s') - phi(s)``."""
    return gamma * phi_s_next - phi_s


class DemoPotential:
    """
    Potential of agent states against a cyclic demonstration.

    The target for control step ``k`` is ``phase_lookup(track, k)``.
    """

    def __init__(self, cfg: PotentialConfig, track: DemoTrack):
        self.cfg = cfg
        self.track = track

    @property
    def gamma(self) -> float:
        return self.cfg.gamma

    def __call__(self, agent: KeypointSet, control_step: int) -> float:
        return state_potential(agent, phase_lookup(self.track, control_step), self.cfg)

    def shaping(self, phi_s: float, phi_s_next: float) -> float:
        return shaping_reward(phi_s, phi_s_next, self.cfg.gamma)
