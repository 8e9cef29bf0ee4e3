from pyrunshaper.core.tabular.gridworld import (
    Action,
    Gridworld,
    ValueIterationResult,
    greedy_action,
    greedy_policy,
    value_iteration,
)
from pyrunshaper.core.tabular.invariance import (
    InvarianceReport,
    VerificationSummary,
    potential_suite,
    run_invariance_experiment,
    run_verification_suite,
)
from pyrunshaper.core.tabular.qlearning import (
    init_q_table,
    paired_initialization_check,
    q_update,
    train_episodes,
)

__all__ = [
    'Action',
    'Gridworld',
    'ValueIterationResult',
    'greedy_action',
    'greedy_policy',
    'value_iteration',
    'InvarianceReport',
    'VerificationSummary',
    'potential_suite',
    'run_invariance_experiment',
    'run_verification_suite',
    'init_q_table',
    'paired_initialization_check',
    'q_update',
    'train_episodes',
]
