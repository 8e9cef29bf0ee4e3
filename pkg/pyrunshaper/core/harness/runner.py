"""
Multi-seed experiment orchestration.

Every (arm, seed) run is independent and writes only its own curve file,
so runs execute concurrently on a thread pool. The aggregate is written
after all runs have finished, and only if all of them succeeded.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import pandas as pd

from pyrunshaper.core.agent.trainer import (
    CURVE_COLUMNS,
    TrainingResult,
    evaluate,
    train,
)
from pyrunshaper.core.errors import RunFailedError
from pyrunshaper.core.harness.aggregate import aggregate_hash, aggregate_preset
from pyrunshaper.core.harness.presets import SOURCE_DEMO
from pyrunshaper.core.harness.suboptimal import make_suboptimal_demo
from pyrunshaper.core.storage.file_run_storage import FileRunStorage
from pyrunshaper.core.storage.run_storage import RunStorage
from pyrunshaper.logging.setup import get_logger
from pyrunshaper.models import AgentConfig, EnvConfig, ExperimentConfig
from pyrunshaper.utils import config_hash

logger = get_logger(__name__)

SOURCE_CHECKPOINT = "source_actor.mlp"
SOURCE_TRACK = "source_demo.csv"
SOURCE_EVAL_COLUMNS = ("run_seed", "env_steps", "eval_mean_distance", "eval_mean_env_return")


@dataclass(frozen=True)
class RunTask:
    """One arm trained on one seed."""
    arm: str
    seed: int
    env: EnvConfig
    agent: AgentConfig
    config_hash: str

    @property
    def label(self) -> str:
        return f"{self.arm}/seed_{self.seed}"


@dataclass
class RunSummary:
    preset: str
    curves: dict[str, str] = field(default_factory=dict)
    aggregate: str | None = None
    source_eval: str | None = None


def curve_frame(result: TrainingResult) -> pd.DataFrame:
    return pd.DataFrame([p.as_row() for p in result.curve], columns=list(CURVE_COLUMNS))


class ExperimentRunner:
    """
    Runs every arm of an experiment over every seed.

    Args:
        config: Resolved experiment configuration
        storage: Output storage; files under ``config.output_dir`` by default
        threads: Maximum number of runs in flight
        record_wall_clock: Write real elapsed seconds into curves
    """

    def __init__(self, config: ExperimentConfig, storage: RunStorage | None = None,
                 threads: int = 1, record_wall_clock: bool = False):
        self.config = config
        self.storage = storage or FileRunStorage(config.output_dir)
        self.threads = max(1, threads)
        self.record_wall_clock = record_wall_clock

    def _run_hash(self, arm: str, seed: int, env: EnvConfig, agent: AgentConfig) -> str:
        c = self.config
        return config_hash({
            "preset": c.preset, "arm": arm, "seed": seed,
            "env": env.model_dump(mode="json"),
            "agent": agent.model_dump(mode="json"),
            "budget": c.budget, "eval_interval": c.eval_interval,
            "eval_episodes": c.eval_episodes,
            "source_stage": c.source_stage.model_dump(mode="json") if c.source_stage else None,
        })

    def tasks(self) -> list[RunTask]:
        """All (arm, seed) runs in arm-major order."""
        tasks = []
        for arm in self.config.arms:
            env, agent = self.config.resolve_arm(arm.name)
            for seed in self.config.seeds:
                tasks.append(RunTask(arm.name, seed, env, agent,
                                     self._run_hash(arm.name, seed, env, agent)))
        return tasks

    def _check_outputs(self, tasks: list[RunTask]) -> None:
        """Refuse up front any output another configuration already wrote."""
        c = self.config
        curve_hashes: dict[str, dict[int, str]] = {}
        for task in tasks:
            self.storage.check_curve(c.preset, task.arm, task.seed, task.config_hash)
            curve_hashes.setdefault(task.arm, {})[task.seed] = task.config_hash
        self.storage.check_aggregate(c.preset, aggregate_hash(curve_hashes))
        if c.source_stage is not None:
            self.storage.check_source_eval(c.preset, self._source_stage_hash())

    def _source_stage_budget(self) -> int:
        return max(1, int(self.config.budget * self.config.source_stage.budget_fraction))

    def _source_stage_hash(self) -> str:
        c = self.config
        return config_hash({
            "preset": c.preset, "stage": "source", "seed": c.seeds[0],
            "budget": self._source_stage_budget(),
            "env": c.env.model_dump(mode="json"),
            "agent": c.agent.model_copy(update={"shaping": None}).model_dump(mode="json"),
            "eval_episodes": c.eval_episodes, "episodes": c.source_stage.episodes,
        })

    def _run_source_stage(self, summary: RunSummary) -> str:
        """
        Train the unshaped source policy on a fraction of the budget and
        derive a demo track from it.

        Returns:
            Path of the derived demo track
        """
        c = self.config
        stage = c.source_stage
        env = c.env
        agent = c.agent.model_copy(update={"shaping": None})
        seed = c.seeds[0]
        budget = self._source_stage_budget()
        stage_hash = self._source_stage_hash()
        directory = self.storage.source_dir(c.preset)
        os.makedirs(directory, exist_ok=True)

        logger.info(f"Source stage: training unshaped policy for {budget} steps (seed {seed})")
        result = train(env, agent, budget, min(c.eval_interval, budget), c.eval_episodes,
                       seed, record_wall_clock=False)
        checkpoint = os.path.join(directory, SOURCE_CHECKPOINT)
        result.agent.save(checkpoint, {
            "action_repeat": agent.action_repeat,
            "keypoint_features": agent.keypoint_features,
            "config_hash": stage_hash,
            "control_steps": budget,
        })

        evaluation = evaluate(result.agent, env, c.eval_episodes)
        table = pd.DataFrame([(seed, budget, evaluation.mean_distance, evaluation.mean_env_return)],
                             columns=list(SOURCE_EVAL_COLUMNS))
        summary.source_eval = self.storage.write_source_eval(c.preset, table, stage_hash)

        track_path = os.path.join(directory, SOURCE_TRACK)
        make_suboptimal_demo(checkpoint, env, track_path, episodes=stage.episodes,
                             agent_config=agent)
        return track_path

    def _with_demo(self, task: RunTask, demo_path: str) -> RunTask:
        shaping = task.agent.shaping
        if shaping is None or shaping.demo != SOURCE_DEMO:
            return task
        agent = task.agent.model_copy(
            update={"shaping": shaping.model_copy(update={"demo": demo_path})})
        return RunTask(task.arm, task.seed, task.env, agent, task.config_hash)

    def _run_task(self, task: RunTask) -> str:
        logger.info(f"Starting {self.config.preset}/{task.label}")
        result = train(task.env, task.agent, self.config.budget, self.config.eval_interval,
                       self.config.eval_episodes, task.seed,
                       record_wall_clock=self.record_wall_clock)
        location = self.storage.write_curve(self.config.preset, task.arm, task.seed,
                                            curve_frame(result), task.config_hash)
        final = result.curve[-1]
        logger.info(f"Finished {self.config.preset}/{task.label}: final eval distance "
                    f"{final.eval_mean_distance:.3f} m")
        return location

    def run(self) -> RunSummary:
        """
        Execute the experiment.

        Returns:
            Locations of everything written

        Raises:
            OutputConflictError: If a curve, the aggregate or the source
                evaluation of another configuration (including another seed
                list) is in the way; checked before any training
            RunFailedError: If any run failed; finished curves are kept and
                no aggregate is written
        """
        summary = RunSummary(preset=self.config.preset)
        tasks = self.tasks()
        self._check_outputs(tasks)

        if self.config.source_stage is not None:
            demo_path = self._run_source_stage(summary)
            tasks = [self._with_demo(t, demo_path) for t in tasks]

        failed: dict[str, str] = {}
        workers = min(self.threads, len(tasks))
        logger.info(f"Running {len(tasks)} run(s) of {self.config.preset} on {workers} thread(s)")
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(self._run_task, task): task for task in tasks}
            for future in as_completed(futures):
                task = futures[future]
                try:
                    summary.curves[task.label] = future.result()
                except Exception as e:
                    logger.error(f"Run {task.label} failed: {e}")
                    failed[task.label] = f"{type(e).__name__}: {e}"

        if failed:
            logger.warning(f"{len(failed)} of {len(tasks)} run(s) failed; aggregate not written")
            raise RunFailedError(
                f"{len(failed)} of {len(tasks)} run(s) of {self.config.preset} failed; "
                "completed curves were kept and no aggregate was written",
                failed=dict(sorted(failed.items())))

        summary.curves = dict(sorted(summary.curves.items()))
        summary.aggregate = aggregate_preset(self.storage, self.config.preset,
                                             [arm.name for arm in self.config.arms],
                                             self.config.seeds)
        return summary


def run_experiment(config: ExperimentConfig, threads: int = 1,
                   record_wall_clock: bool = False,
                   storage: RunStorage | None = None) -> RunSummary:
    """Run an experiment with file storage under ``config.output_dir``."""
    return ExperimentRunner(config, storage, threads, record_wall_clock).run()
