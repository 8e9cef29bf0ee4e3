"""
Named experiment presets and key=value experiment files.

Every preset shares one seed list and one evaluation schedule across its
arms, so arms are compared on identical starts.
"""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

from pyrunshaper.core.demo.track import BUNDLED_DEMOS
from pyrunshaper.core.errors import ConfigurationError, PresetNotFoundError
from pyrunshaper.models import (
    AgentConfig,
    ArmSpec,
    ExperimentConfig,
    PotentialConfig,
    PotentialKind,
    ShapingConfig,
    SourceStageConfig,
    deep_merge,
    validate_model,
)
from pyrunshaper.utils import parse_key_value

# Demo name replaced by the track the source stage derives from its policy
SOURCE_DEMO = "source"

# Hidden-layer layouts for the topology sweep, as (layers, width)
TOPOLOGY_SWEEP = ((2, 64), (3, 128), (4, 256))


def _shaped_agent(kind: PotentialKind = PotentialKind.PF3, demo: str = "human") -> AgentConfig:
    return AgentConfig(shaping=ShapingConfig(potential=PotentialConfig(kind=kind), demo=demo))


def baseline_ablations() -> ExperimentConfig:
    """Unshaped agent with each baseline ingredient switched off in turn."""
    arms = [
        ArmSpec(name="baseline"),
        ArmSpec(name="no_keypoint_features", agent={"keypoint_features": False}),
        ArmSpec(name="no_mirror", agent={"mirror_augment": False}),
        ArmSpec(name="action_repeat_1", agent={"action_repeat": 1}),
        ArmSpec(name="float64", agent={"precision": "float64"}),
    ]
    arms += [ArmSpec(name=f"topology_{layers}x{width}",
                     agent={"hidden_layers": [width] * layers})
             for layers, width in TOPOLOGY_SWEEP]
    return ExperimentConfig(preset="baseline_ablations", agent=AgentConfig(), arms=arms)


def pf_compare() -> ExperimentConfig:
    """Three potential-function families against the human-like track."""
    arms = [ArmSpec(name=kind.value.lower(),
                    agent={"shaping": {"potential": {"kind": kind.value}}})
            for kind in PotentialKind]
    return ExperimentConfig(preset="pf_compare", agent=_shaped_agent(), arms=arms)


def source_compare() -> ExperimentConfig:
    """One arm per bundled demonstration track, PF3 throughout."""
    arms = [ArmSpec(name=demo, agent={"shaping": {"demo": demo}})
            for demo in BUNDLED_DEMOS]
    return ExperimentConfig(preset="source_compare", agent=_shaped_agent(), arms=arms)


def shaped_vs_baseline() -> ExperimentConfig:
    """PF3 shaping from the human-like track against the unshaped baseline."""
    arms = [ArmSpec(name="baseline", agent={"shaping": None}),
            ArmSpec(name="shaped")]
    return ExperimentConfig(preset="shaped_vs_baseline", agent=_shaped_agent(), arms=arms)


def suboptimal_demo() -> ExperimentConfig:
    """
    Shaping from a weak policy: a baseline source run at a quarter of the
    budget is turned into a demo track before the shaped arm trains.
    """
    return ExperimentConfig(
        preset="suboptimal_demo",
        agent=_shaped_agent(demo=SOURCE_DEMO),
        arms=[ArmSpec(name="shaped")],
        source_stage=SourceStageConfig(),
    )


PRESETS: dict[str, Callable[[], ExperimentConfig]] = {
    "baseline_ablations": baseline_ablations,
    "pf_compare": pf_compare,
    "source_compare": source_compare,
    "shaped_vs_baseline": shaped_vs_baseline,
    "suboptimal_demo": suboptimal_demo,
}


def preset_names() -> list[str]:
    return list(PRESETS)


def _drop_stale_shaping_gamma(base: dict[str, Any], overrides: dict[str, Any]) -> None:
    """
    Let an overridden agent discount carry into the shaping discount when the
    overrides do not set the latter explicitly.
    """
    agent_over = overrides.get("agent") or {}
    gamma_changed = "gamma" in (agent_over.get("hyper") or {})
    shaping_over = agent_over.get("shaping")
    gamma_given = isinstance(shaping_over, dict) and "gamma" in (shaping_over.get("potential") or {})
    shaping = base.get("agent", {}).get("shaping")
    if gamma_changed and not gamma_given and isinstance(shaping, dict):
        shaping.get("potential", {}).pop("gamma", None)


def preset(name: str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Fully resolved configuration of a named preset.

    Args:
        name: One of :data:`PRESETS`
        overrides: Nested values applied on top (``{"budget": 1000}``)

    Returns:
        Validated ExperimentConfig

    Raises:
        PresetNotFoundError: If the name is unknown (lists the known names)
        ConfigurationError: If the overrides produce an invalid config
    """
    if name not in PRESETS:
        raise PresetNotFoundError(name, preset_names())
    config = PRESETS[name]()
    if not overrides:
        return config
    overrides = dict(overrides)
    given = overrides.pop("preset", name)
    if given != name:
        raise ConfigurationError(
            f"Configuration is for preset {given!r} but {name!r} was requested")
    data = config.model_dump(mode="json")
    _drop_stale_shaping_gamma(data, overrides)
    return validate_model(ExperimentConfig, deep_merge(data, overrides), f"preset {name}")


def load_experiment_config(path: str, name: str | None = None,
                           overrides: dict[str, Any] | None = None,
                           defaults: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Load a key=value experiment file on top of its preset.

    The preset comes from ``name`` or, failing that, the file's ``preset``
    key. Keys are dotted paths into ExperimentConfig
    (``agent.hyper.actor_lr=1e-4``); unknown keys are rejected.

    Args:
        path: Experiment file
        name: Preset name (takes precedence over the file's ``preset`` key)
        overrides: Further values applied after the file (CLI flags)
        defaults: Values applied before the file (application settings)

    Raises:
        ConfigurationError: If the file cannot be read or validated
    """
    try:
        with open(path, encoding="utf-8") as f:
            values = parse_key_value(f.read(), source=path)
    except OSError as e:
        raise ConfigurationError(f"Cannot read experiment config {path}: {e}") from e
    file_preset = values.pop("preset", None)
    name = name or file_preset
    if name is None:
        raise ConfigurationError(f"{path} names no preset; pass --preset or add preset=<name>")
    layered = deep_merge(deep_merge(defaults or {}, values), overrides or {})
    return preset(name, layered)
