"""
Policy-invariance experiments: shaped vs plain Q-learning against the
value-iteration oracle, and the suite behind ``verify-pbrs``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from pyrunshaper.core.tabular.gridworld import (
    Action,
    Gridworld,
    greedy_policy,
    value_iteration,
)
from pyrunshaper.core.tabular.qlearning import (
    GAMMA,
    LearnerSchedule,
    init_q_table,
    paired_initialization_check,
    train_episodes,
)
from pyrunshaper.logging.setup import get_logger

logger = get_logger(__name__)

AGREEMENT_CHUNK = 500
INIT_EQUIVALENCE_TOLERANCE = 1e-12
REPORT_COLUMNS = ("state", "oracle_action", "shaped_action", "unshaped_action")


def _chunk_seed(seed: int, chunk: int) -> int:
    return int(np.random.SeedSequence([seed, chunk]).generate_state(1)[0])


@dataclass
class LearnerRun:
    q: np.ndarray
    policy: np.ndarray
    episodes_to_agreement: int | None


def _train_learner(world: Gridworld, phi: np.ndarray | None, oracle: np.ndarray,
                   episodes: int, seed: int, schedule: LearnerSchedule,
                   chunk: int) -> LearnerRun:
    """Train in chunks, noting when the greedy policy first matches the oracle."""
    q = init_q_table(world)
    cells = slice(0, world.n_cells)
    reached = None
    done = 0
    index = 0
    while done < episodes:
        n = min(chunk, episodes - done)
        train_episodes(q, world, phi, done, n, episodes, _chunk_seed(seed, index), schedule)
        done += n
        index += 1
        if reached is None and np.array_equal(greedy_policy(q)[cells], oracle[cells]):
            reached = done
    return LearnerRun(q=q, policy=greedy_policy(q), episodes_to_agreement=reached)


@dataclass
class InvarianceReport:
    """Greedy policies of the shaped and plain learners next to the oracle."""
    world: Gridworld
    potential_name: str
    seed: int
    episodes: int
    oracle_policy: np.ndarray
    shaped: LearnerRun
    unshaped: LearnerRun

    @property
    def shaped_agreement(self) -> np.ndarray:
        cells = slice(0, self.world.n_cells)
        return self.shaped.policy[cells] == self.oracle_policy[cells]

    @property
    def unshaped_agreement(self) -> np.ndarray:
        cells = slice(0, self.world.n_cells)
        return self.unshaped.policy[cells] == self.oracle_policy[cells]

    @property
    def shaped_matches_oracle(self) -> bool:
        return bool(np.all(self.shaped_agreement))

    @property
    def unshaped_matches_oracle(self) -> bool:
        return bool(np.all(self.unshaped_agreement))

    def rows(self) -> list[tuple[str, str, str, str]]:
        return [(self.world.label(s),
                 Action(self.oracle_policy[s]).name.lower(),
                 Action(self.shaped.policy[s]).name.lower(),
                 Action(self.unshaped.policy[s]).name.lower())
                for s in range(self.world.n_cells)]

    def to_text(self) -> str:
        """Plain-text table of per-state agreement."""
        lines = [
            f"potential={self.potential_name} seed={self.seed} episodes={self.episodes}",
            f"{'state':<8} {'oracle':<7} {'shaped':<7} {'unshaped':<8} agree",
        ]
        for (state, oracle, shaped, unshaped), s_ok, u_ok in zip(
                self.rows(), self.shaped_agreement, self.unshaped_agreement):
            mark = ("yes" if s_ok else "NO") + "/" + ("yes" if u_ok else "NO")
            lines.append(f"{state:<8} {oracle:<7} {shaped:<7} {unshaped:<8} {mark}")
        lines.append(
            f"shaped agreement {self.shaped_agreement.mean():.0%} "
            f"(reached after {self.shaped.episodes_to_agreement} episodes), "
            f"unshaped agreement {self.unshaped_agreement.mean():.0%} "
            f"(reached after {self.unshaped.episodes_to_agreement} episodes)")
        return "\n".join(lines)

    def write_csv(self, path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        pd.DataFrame(self.rows(), columns=list(REPORT_COLUMNS)).to_csv(path, index=False)


def run_invariance_experiment(world: Gridworld, potential: np.ndarray, episodes: int,
                              seed: int, potential_name: str = "custom",
                              schedule: LearnerSchedule = LearnerSchedule(),
                              chunk: int = AGREEMENT_CHUNK,
                              unshaped: LearnerRun | None = None) -> InvarianceReport:
    """
    Train shaped (``F = gamma * phi(s') - phi(s)``) and plain learners with
    equal seeds and compare their greedy policies with the oracle.

    Args:
        world: Gridworld
        potential: One value per cell (terminal potential is 0)
        episodes: Episodes per learner
        seed: Seed shared by both learners
        potential_name: Label for reports
        schedule: Step size, discount and exploration settings
        chunk: Episodes between agreement checks
        unshaped: Previously trained plain learner for the same seed, reused
            instead of training again
    """
    oracle = value_iteration(world, schedule.gamma).policy
    shaped_run = _train_learner(world, potential, oracle, episodes, seed, schedule, chunk)
    if unshaped is None:
        unshaped = _train_learner(world, None, oracle, episodes, seed, schedule, chunk)
    return InvarianceReport(world=world, potential_name=potential_name, seed=seed,
                            episodes=episodes, oracle_policy=oracle,
                            shaped=shaped_run, unshaped=unshaped)


def potential_suite(world: Gridworld, gamma: float = GAMMA,
                    seed: int = 0) -> dict[str, np.ndarray]:
    """Zero, random in [-10, 10], optimal values and their negation."""
    v_star = value_iteration(world, gamma).values[:world.n_cells]
    rng = np.random.default_rng(seed)
    return {
        "zero": np.zeros(world.n_cells),
        "random": rng.uniform(-10.0, 10.0, world.n_cells),
        "v_star": v_star.copy(),
        "neg_v_star": -v_star,
    }


@dataclass
class VerificationSummary:
    """Outcome of the full policy-invariance and initialization suite."""
    reports: list[InvarianceReport] = field(default_factory=list)
    init_gaps: dict[str, float] = field(default_factory=dict)
    paired_updates: int = 0

    @property
    def invariance_passed(self) -> bool:
        return all(r.shaped_matches_oracle for r in self.reports)

    @property
    def init_equivalence_passed(self) -> bool:
        return all(gap <= INIT_EQUIVALENCE_TOLERANCE for gap in self.init_gaps.values())

    @property
    def passed(self) -> bool:
        return self.invariance_passed and self.init_equivalence_passed

    def median_episodes_to_agreement(self, potential_name: str) -> tuple[float, float]:
        """Median (shaped, unshaped) episodes to reach oracle agreement."""
        reports = [r for r in self.reports if r.potential_name == potential_name]
        big = float("inf")
        shaped = [r.shaped.episodes_to_agreement or big for r in reports]
        unshaped = [r.unshaped.episodes_to_agreement or big for r in reports]
        return float(np.median(shaped)), float(np.median(unshaped))

    def to_text(self) -> str:
        lines = ["potential    seeds  shaped==oracle  median episodes (shaped/unshaped)"]
        for name in dict.fromkeys(r.potential_name for r in self.reports):
            reports = [r for r in self.reports if r.potential_name == name]
            ok = sum(r.shaped_matches_oracle for r in reports)
            shaped, unshaped = self.median_episodes_to_agreement(name)
            lines.append(f"{name:<12} {len(reports):>5}  {ok:>6}/{len(reports):<7} "
                         f"{shaped:.0f}/{unshaped:.0f}")
        lines.append(f"initialization equivalence over {self.paired_updates} paired updates:")
        for name, gap in self.init_gaps.items():
            lines.append(f"  {name:<12} max |Q_shaped - (Q_init - phi)| = {gap:.3e}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def run_verification_suite(episodes: int, seeds: list[int], paired_updates: int,
                           world: Gridworld | None = None,
                           out_dir: str | None = None) -> VerificationSummary:
    """
    Run every suite potential over every seed, plus the paired-update
    initialization check for each potential.

    Args:
        episodes: Episodes per learner
        seeds: Learner seeds
        paired_updates: Updates for the initialization check
        world: Gridworld (5x5 default)
        out_dir: When given, per-run text and CSV reports are written here
    """
    world = world or Gridworld()
    summary = VerificationSummary(paired_updates=paired_updates)
    potentials = potential_suite(world)
    oracle = value_iteration(world, GAMMA).policy
    schedule = LearnerSchedule()

    for seed in seeds:
        unshaped = _train_learner(world, None, oracle, episodes, seed, schedule,
                                  AGREEMENT_CHUNK)
        for name, phi in potentials.items():
            report = run_invariance_experiment(world, phi, episodes, seed, name,
                                               schedule, unshaped=unshaped)
            summary.reports.append(report)
            level = "info" if report.shaped_matches_oracle else "error"
            getattr(logger, level)(
                f"{name} seed {seed}: shaped agreement "
                f"{report.shaped_agreement.mean():.0%}")
            if out_dir is not None:
                stem = os.path.join(out_dir, f"{name}_seed_{seed}")
                report.write_csv(stem + ".csv")
                with open(stem + ".txt", "w", encoding="utf-8") as f:
                    f.write(report.to_text() + "\n")

    for i, (name, phi) in enumerate(potentials.items()):
        gap, _, _ = paired_initialization_check(world, phi, paired_updates, seed=i)
        summary.init_gaps[name] = gap
        logger.info(f"initialization equivalence for {name}: max gap {gap:.3e}")

    if out_dir is not None:
        with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as f:
            f.write(summary.to_text() + "\n")
    return summary
