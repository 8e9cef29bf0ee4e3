import pytest

from pyrunshaper.core.errors import ConfigurationError, PresetNotFoundError
from pyrunshaper.core.harness.presets import (
    SOURCE_DEMO,
    load_experiment_config,
    preset,
    preset_names,
)
from pyrunshaper.models import PotentialKind


def test_preset_names():
    assert preset_names() == ["baseline_ablations", "pf_compare", "source_compare",
                              "shaped_vs_baseline", "suboptimal_demo"]


def test_unknown_preset_lists_available():
    with pytest.raises(PresetNotFoundError) as exc_info:
        preset("nope")
    assert "pf_compare" in str(exc_info.value)
    assert exc_info.value.available == preset_names()


def test_pf_compare_arms():
    config = preset("pf_compare")
    assert [arm.name for arm in config.arms] == ["pf1", "pf2", "pf3"]
    kinds = [config.resolve_arm(arm.name)[1].shaping.potential.kind for arm in config.arms]
    assert kinds == [PotentialKind.PF1, PotentialKind.PF2, PotentialKind.PF3]


def test_source_compare_uses_each_bundled_track():
    config = preset("source_compare")
    demos = [config.resolve_arm(arm.name)[1].shaping.demo for arm in config.arms]
    assert demos == ["cartoon", "game", "human"]


def test_shaped_vs_baseline():
    config = preset("shaped_vs_baseline")
    assert config.resolve_arm("baseline")[1].shaping is None
    assert config.resolve_arm("shaped")[1].shaping.potential.kind is PotentialKind.PF3


def test_baseline_ablations():
    config = preset("baseline_ablations")
    names = [arm.name for arm in config.arms]
    assert names[:5] == ["baseline", "no_keypoint_features", "no_mirror",
                         "action_repeat_1", "float64"]
    assert config.resolve_arm("topology_3x128")[1].hidden_layers == [128] * 3
    assert config.resolve_arm("no_mirror")[1].mirror_augment is False
    assert all(config.resolve_arm(n)[1].shaping is None for n in names)


def test_suboptimal_demo_has_source_stage():
    config = preset("suboptimal_demo")
    assert config.source_stage is not None
    assert config.source_stage.budget_fraction == 0.25
    assert config.resolve_arm("shaped")[1].shaping.demo == SOURCE_DEMO


def test_overrides():
    config = preset("pf_compare", {"budget": 500, "seeds": [4, 5],
                                   "agent": {"hyper": {"gamma": 0.95}}})
    assert config.budget == 500
    assert config.seeds == [4, 5]
    _, agent = config.resolve_arm("pf2")
    assert agent.hyper.gamma == 0.95
    assert agent.shaping.potential.gamma == 0.95


def test_override_for_other_preset_rejected():
    with pytest.raises(ConfigurationError, match="pf_compare"):
        preset("source_compare", {"preset": "pf_compare", "budget": 5})


def test_invalid_override_rejected():
    with pytest.raises(ConfigurationError):
        preset("pf_compare", {"budget": -1})


def test_load_experiment_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("preset=shaped_vs_baseline\nbudget=300\nseeds=1,2\n"
                    "agent.hyper.actor_lr=1e-4\nenv.max_steps=120\n")
    config = load_experiment_config(str(path), overrides={"budget": 200})
    assert config.preset == "shaped_vs_baseline"
    assert config.budget == 200
    assert config.seeds == [1, 2]
    assert config.env.max_steps == 120
    assert config.agent.hyper.actor_lr == pytest.approx(1e-4)


def test_experiment_file_layers_over_defaults(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("preset=pf_compare\nbudget=300\n")
    defaults = {"output_dir": "app_runs", "budget": 50}

    config = load_experiment_config(str(path), defaults=defaults)
    assert config.output_dir == "app_runs"
    assert config.budget == 300

    path.write_text("preset=pf_compare\noutput_dir=file_runs\n")
    config = load_experiment_config(str(path), overrides={"output_dir": "cli_runs"},
                                    defaults=defaults)
    assert config.output_dir == "cli_runs"


def test_load_experiment_config_errors(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("budget=300\n")
    with pytest.raises(ConfigurationError, match="names no preset"):
        load_experiment_config(str(path))
    path.write_text("preset=pf_compare\nagent.unknown_key=3\n")
    with pytest.raises(ConfigurationError):
        load_experiment_config(str(path))
    with pytest.raises(ConfigurationError, match="Cannot read"):
        load_experiment_config(str(tmp_path / "missing.cfg"))
