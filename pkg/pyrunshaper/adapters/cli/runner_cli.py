import functools
import os

import click

from pyrunshaper.config.settings import get_config_manager
from pyrunshaper.core.errors import (
    EXIT_RUNTIME_FAILURE,
    ConfigurationError,
    RunFailedError,
    exit_code_for,
)
from pyrunshaper.core.harness.aggregate import aggregate_preset
from pyrunshaper.core.harness.presets import load_experiment_config, preset
from pyrunshaper.core.harness.runner import run_experiment
from pyrunshaper.core.harness.suboptimal import make_suboptimal_demo
from pyrunshaper.core.neural.gradcheck import run_gradcheck
from pyrunshaper.core.storage.file_run_storage import FileRunStorage
from pyrunshaper.core.tabular.invariance import run_verification_suite
from pyrunshaper.logging.setup import get_logger, setup_logging
from pyrunshaper.models import AgentConfig, EnvConfig, deep_merge, validate_model
from pyrunshaper.utils import parse_key_value, parse_seed_list

logger = get_logger(__name__)


def handle_errors(command):
    """Report library errors on stderr and exit with their exit code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except Exception as e:
            if isinstance(e, RunFailedError):
                for label, reason in e.failed.items():
                    click.echo(f"  {label}: {reason}", err=True)
            click.echo(f"Error: {e}", err=True)
            click.get_current_context().exit(exit_code_for(e))
    return wrapper


@click.group()
@click.option("--app-config", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Application settings YAML (threads, logging, suites)")
@click.pass_context
def runner_cli(ctx, app_config):
    """Reward-shaping experiment runner."""
    ctx.ensure_object(dict)
    config_manager = get_config_manager()
    try:
        config_manager.load(app_config)
    except (ConfigurationError, FileNotFoundError) as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(exit_code_for(ConfigurationError(str(e))))
    setup_logging(config_manager.logging_config)
    ctx.obj["CONFIG_MANAGER"] = config_manager


@runner_cli.command()
@click.option("--preset", "preset_name", default=None,
              help="Preset name (baseline_ablations, pf_compare, source_compare, "
                   "shaped_vs_baseline, suboptimal_demo)")
@click.option("--seeds", default=None, help="Comma-separated seeds, e.g. 0,1,2")
@click.option("--budget", type=int, default=None, help="Control steps per run")
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Output directory")
@click.option("--config", "config_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="key=value experiment file applied on top of the preset")
@click.pass_context
@handle_errors
def run(ctx, preset_name, seeds, budget, out, config_file):
    """Train every arm of a preset over every seed and aggregate."""
    config_manager = ctx.obj["CONFIG_MANAGER"]
    overrides = {}
    if seeds is not None:
        overrides["seeds"] = parse_seed_list(seeds)
    if budget is not None:
        overrides["budget"] = budget
    if out is not None:
        overrides["output_dir"] = out

    app_defaults = {"output_dir": config_manager.output_dir}
    if config_file is not None:
        config = load_experiment_config(config_file, preset_name, overrides, app_defaults)
    elif preset_name is not None:
        config = preset(preset_name, deep_merge(app_defaults, overrides))
    else:
        raise ConfigurationError("Either --preset or --config is required")

    summary = run_experiment(config, threads=config_manager.runner_threads,
                             record_wall_clock=config_manager.record_wall_clock)
    click.echo(f"Preset {config.preset}: {len(summary.curves)} run(s) written.")
    if summary.source_eval:
        click.echo(f"Source policy evaluation: {summary.source_eval}")
    click.echo(f"Aggregate: {summary.aggregate}")


@runner_cli.command()
@click.option("--dir", "directory", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Preset output directory (<out>/<preset>)")
@handle_errors
def aggregate(directory):
    """Recompute the aggregate of a preset directory from its seed curves."""
    directory = os.path.normpath(directory)
    storage = FileRunStorage(os.path.dirname(directory) or ".")
    location = aggregate_preset(storage, os.path.basename(directory))
    click.echo(f"Aggregate: {location}")


def _demo_configs(config_file: str | None) -> tuple[EnvConfig, AgentConfig | None]:
    if config_file is None:
        return EnvConfig(), None
    with open(config_file, encoding="utf-8") as f:
        values = parse_key_value(f.read(), source=config_file)
    unknown = set(values) - {"env", "agent"}
    if unknown:
        raise ConfigurationError(
            f"{config_file}: unknown section(s) {sorted(unknown)}; expected env.* or agent.*")
    env = validate_model(EnvConfig, values.get("env", {}), "environment")
    agent = validate_model(AgentConfig, values["agent"], "agent") if "agent" in values else None
    return env, agent


@runner_cli.command("make-demo")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Actor checkpoint")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Demo CSV to write")
@click.option("--episodes", type=int, default=3, show_default=True,
              help="Rollouts to pick the best episode from")
@click.option("--config", "config_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="key=value file with env.* (and optionally agent.*) settings")
@handle_errors
def make_demo(checkpoint, out, episodes, config_file):
    """Record a demo track from a trained policy."""
    env, agent = _demo_configs(config_file)
    track = make_suboptimal_demo(checkpoint, env, out, episodes=episodes, agent_config=agent)
    click.echo(f"Wrote {len(track)} frames to {out}")


@runner_cli.command("verify-pbrs")
@click.option("--episodes", type=int, default=None, help="Episodes per learner")
@click.option("--seeds", default=None, help="Comma-separated learner seeds")
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Directory for per-run reports")
@click.pass_context
@handle_errors
def verify_pbrs(ctx, episodes, seeds, out):
    """Check shaping policy invariance and initialization equivalence on a gridworld."""
    settings = ctx.obj["CONFIG_MANAGER"].verify
    if out is not None:
        os.makedirs(out, exist_ok=True)
    summary = run_verification_suite(
        episodes=episodes or settings.episodes,
        seeds=parse_seed_list(seeds) if seeds else list(settings.seeds),
        paired_updates=settings.paired_updates,
        out_dir=out,
    )
    click.echo(summary.to_text())
    if not summary.passed:
        ctx.exit(EXIT_RUNTIME_FAILURE)


@runner_cli.command()
@click.option("--cases", type=int, default=None, help="Random cases per topology")
@click.pass_context
@handle_errors
def gradcheck(ctx, cases):
    """Compare MLP backprop with central finite differences."""
    settings = ctx.obj["CONFIG_MANAGER"].gradcheck
    results = run_gradcheck(cases=cases or settings.cases,
                            max_params=settings.max_params_per_case,
                            step=settings.step, tolerance=settings.tolerance)
    for result in results:
        status = "ok" if result.passed else "FAILED"
        click.echo(f"{result.label:<8} max relative error {result.max_relative_error:.3e} "
                   f"(tolerance {result.tolerance:.0e}) {status}")
    if not all(r.passed for r in results):
        ctx.exit(EXIT_RUNTIME_FAILURE)


if __name__ == "__main__":
    runner_cli()
