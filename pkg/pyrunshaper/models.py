from __future__ import annotations

from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from pyrunshaper.core.errors import ConfigurationError


class _StrictModel(BaseModel):
    """Base for every experiment-facing model: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid", frozen=True)


# Environment Models
class JointTriple(_StrictModel):
    """One value per joint type, shared by both legs."""
    hip: float
    knee: float
    ankle: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.hip, self.knee, self.ankle)


class JointLimit(_StrictModel):
    low: float
    high: float

    @model_validator(mode="after")
    def _ordered(self) -> 'JointLimit':
        if not self.low < self.high:
            raise ValueError(
                f"joint limit low ({self.low}) must be below high ({self.high})")
        if not self.low <= 0.0 <= self.high:
            raise ValueError("joint limits must contain the upright pose (0 rad)")
        return self


class JointLimits(_StrictModel):
    hip: JointLimit = JointLimit(low=-1.0, high=1.6)
    knee: JointLimit = JointLimit(low=-2.4, high=0.1)
    ankle: JointLimit = JointLimit(low=-0.8, high=0.8)


class EnvConfig(_StrictModel):
    """
    Physical and episodic parameters of the planar biped.

    Segment lengths in meters, masses in kg, torques in N·m. Joint inertias are
    the reflected (armature) inertias of each joint type.
    """
    dt: float = Field(default=0.01, gt=0.0)
    gravity: float = Field(default=9.81, ge=0.0)

    thigh_length: float = Field(default=0.45, gt=0.0)
    shank_length: float = Field(default=0.45, gt=0.0)
    foot_length: float = Field(default=0.20, gt=0.0)

    pelvis_mass: float = Field(default=20.0, gt=0.0)
    thigh_mass: float = Field(default=6.0, gt=0.0)
    shank_mass: float = Field(default=3.0, gt=0.0)
    foot_mass: float = Field(default=1.0, gt=0.0)
    pelvis_inertia: float = Field(default=10.0, gt=0.0)
    joint_inertia: JointTriple = JointTriple(hip=4.0, knee=2.5, ankle=0.6)
    joint_damping: float = Field(default=2.0, ge=0.0)

    joint_limits: JointLimits = JointLimits()
    torque_scale: JointTriple = JointTriple(hip=150.0, knee=120.0, ankle=60.0)

    ground_stiffness: float = Field(default=1.0e4, gt=0.0)
    ground_damping: float = Field(default=300.0, ge=0.0)
    ground_tangential_damping: float = Field(default=300.0, ge=0.0)
    friction_coeff: float = Field(default=1.0, ge=0.0)

    max_joint_speed: float = Field(default=20.0, gt=0.0)
    max_pelvis_speed: float = Field(default=10.0, gt=0.0)
    max_pelvis_angvel: float = Field(default=20.0, gt=0.0)

    fall_height_threshold: float | None = Field(
        default=None, gt=0.0,
        description="Defaults to 0.6 x standing pelvis height")
    max_steps: int = Field(default=1500, gt=0)
    effort_cost_coeff: float = Field(default=0.01, ge=0.0)
    reset_noise: float = Field(default=0.01, ge=0.0)

    @property
    def leg_length(self) -> float:
        """Standing pelvis height: thigh plus shank."""
        return self.thigh_length + self.shank_length

    @property
    def fall_height(self) -> float:
        if self.fall_height_threshold is not None:
            return self.fall_height_threshold
        return 0.6 * self.leg_length

    @property
    def total_mass(self) -> float:
        return self.pelvis_mass + 2.0 * (
            self.thigh_mass + self.shank_mass + self.foot_mass)


# Shaping Models
class PotentialKind(str, Enum):
    """Inverse-distance families for per-part potentials."""
    PF1 = "PF1"  # 1 / (dx + dy)
    PF2 = "PF2"  # 1 / sqrt(dx^2 + dy^2)
    PF3 = "PF3"  # 1 / (dx^2 + dy^2)


class PotentialConfig(_StrictModel):
    kind: PotentialKind = PotentialKind.PF3
    epsilon: float = Field(default=1e-3, gt=0.0)
    # Order: r_knee, l_knee, r_foot, l_foot
    part_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    gamma: float = Field(default=0.9, gt=0.0, le=1.0)
    pelvis_height_weight: float = Field(default=0.0, ge=0.0)
    pelvis_target_height: float | None = Field(default=None, gt=0.0)

    @field_validator("part_weights")
    @classmethod
    def _non_negative(cls, weights: tuple[float, ...]) -> tuple[float, ...]:
        if any(w < 0.0 for w in weights):
            raise ValueError(f"part weights must be non-negative, got {weights}")
        return weights

    @model_validator(mode="after")
    def _pelvis_target(self) -> 'PotentialConfig':
        if self.pelvis_height_weight > 0.0 and self.pelvis_target_height is None:
            raise ValueError(
                "pelvis_target_height is required when pelvis_height_weight > 0")
        return self


class ShapingConfig(_StrictModel):
    """Potential settings plus the demonstration they are measured against."""
    potential: PotentialConfig = PotentialConfig()
    demo: str = Field(
        default="human",
        description="Bundled track name (cartoon, game, human) or a CSV path")


# Agent Models
class TrainHyper(_StrictModel):
    actor_lr: float = Field(default=1e-4, gt=0.0)
    critic_lr: float = Field(default=1e-3, gt=0.0)
    gamma: float = Field(default=0.9, gt=0.0, le=1.0)
    tau: float = Field(default=0.005, gt=0.0, le=1.0)
    batch_size: int = Field(default=64, ge=1)
    noise_sigma: float = Field(default=0.2, ge=0.0)
    noise_sigma_final: float = Field(default=0.05, ge=0.0)
    noise_decay_steps: int = Field(default=50_000, ge=1)
    updates_per_step: int = Field(default=1, ge=1)


class AgentConfig(_StrictModel):
    hidden_layers: list[int] = Field(default_factory=lambda: [128] * 5)
    hyper: TrainHyper = TrainHyper()
    action_repeat: int = Field(default=3, ge=1)
    mirror_augment: bool = True
    keypoint_features: bool = True
    precision: Literal["float32", "float64"] = "float32"
    buffer_capacity: int = Field(default=1_000_000, ge=1)
    shaping: ShapingConfig | None = None

    @field_validator("hidden_layers")
    @classmethod
    def _positive_widths(cls, widths: list[int]) -> list[int]:
        if not widths or any(w < 1 for w in widths):
            raise ValueError(f"hidden layer widths must be positive, got {widths}")
        return widths

    @model_validator(mode="before")
    @classmethod
    def _wire_shaping_gamma(cls, data: Any) -> Any:
        """Fill the shaping discount from the agent's when it is not given."""
        if not isinstance(data, dict):
            return data
        shaping = data.get("shaping")
        if not isinstance(shaping, dict):
            return data
        potential = shaping.get("potential")
        if potential is None:
            potential = {}
        if isinstance(potential, dict) and "gamma" not in potential:
            hyper = data.get("hyper")
            gamma = (hyper.get("gamma") if isinstance(hyper, dict)
                     else getattr(hyper, "gamma", None))
            potential = {**potential,
                         "gamma": gamma if gamma is not None else TrainHyper().gamma}
            data = {**data, "shaping": {**shaping, "potential": potential}}
        return data

    @model_validator(mode="after")
    def _matching_gamma(self) -> 'AgentConfig':
        if self.shaping is not None and self.shaping.potential.gamma != self.hyper.gamma:
            raise ValueError(
                "shaping.potential.gamma must equal hyper.gamma "
                f"({self.shaping.potential.gamma} != {self.hyper.gamma}); "
                "potential-based shaping needs the learner's own discount")
        return self


# Experiment Models
class ArmSpec(_StrictModel):
    """One arm of a preset: overrides applied on top of the base configs."""
    name: str
    agent: dict[str, Any] = Field(default_factory=dict)
    env: dict[str, Any] = Field(default_factory=dict)


class SourceStageConfig(_StrictModel):
    """Baseline run that produces a suboptimal demonstration track."""
    budget_fraction: float = Field(default=0.25, gt=0.0, le=1.0)
    episodes: int = Field(default=3, ge=1)


class ExperimentConfig(_StrictModel):
    preset: str
    env: EnvConfig = EnvConfig()
    agent: AgentConfig = AgentConfig()
    arms: list[ArmSpec] = Field(default_factory=lambda: [ArmSpec(name="default")])
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])
    budget: int = Field(default=300_000, gt=0,
                        description="Control steps per run")
    eval_interval: int = Field(default=10_000, gt=0)
    eval_episodes: int = Field(default=3, ge=1)
    output_dir: str = "runs"
    source_stage: SourceStageConfig | None = None

    @field_validator("seeds")
    @classmethod
    def _at_least_one_seed(cls, seeds: list[int]) -> list[int]:
        if not seeds:
            raise ValueError("at least one seed is required")
        if len(set(seeds)) != len(seeds):
            raise ValueError(f"duplicate seeds: {seeds}")
        return seeds

    @field_validator("arms")
    @classmethod
    def _unique_arm_names(cls, arms: list[ArmSpec]) -> list[ArmSpec]:
        names = [arm.name for arm in arms]
        if not names:
            raise ValueError("at least one arm is required")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate arm names: {names}")
        return arms

    def arm(self, name: str) -> ArmSpec:
        for arm in self.arms:
            if arm.name == name:
                return arm
        raise ConfigurationError(
            f"Arm {name!r} not in preset {self.preset!r}: "
            f"{[a.name for a in self.arms]}")

    def resolve_arm(self, name: str) -> tuple[EnvConfig, AgentConfig]:
        """
        Apply an arm's overrides to the base environment and agent configs.

        Args:
            name: Arm name

        Returns:
            Validated (EnvConfig, AgentConfig) for the arm

        Raises:
            ConfigurationError: If the merged configuration is invalid
        """
        arm = self.arm(name)
        env_data = deep_merge(self.env.model_dump(mode="json"), arm.env)
        agent_data = deep_merge(
            self.agent.model_dump(mode="json"), arm.agent)
        # A base-level shaping gamma must follow an arm-level gamma change
        if "shaping" not in arm.agent and agent_data.get("shaping"):
            agent_data["shaping"]["potential"].pop("gamma", None)
        return (validate_model(EnvConfig, env_data, f"arm {name} env"),
                validate_model(AgentConfig, agent_data, f"arm {name} agent"))


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def validate_model(model_cls: type[BaseModel], data: Any, what: str | None = None):
    """
    Validate data into a model, converting pydantic errors to ConfigurationError.

    Args:
        model_cls: Target pydantic model class
        data: Raw data (dict)
        what: Label used in the error message

    Returns:
        Model instance
    """
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        label = what or model_cls.__name__
        raise ConfigurationError(f"Invalid {label} configuration:\n{e}") from e
