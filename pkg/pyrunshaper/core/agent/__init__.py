from pyrunshaper.core.agent.ddpg import DdpgAgent, TrainStats, load_actor
from pyrunshaper.core.agent.replay import Batch, ReplayBuffer
from pyrunshaper.core.agent.trainer import (
    CURVE_COLUMNS,
    CurvePoint,
    EvalResult,
    RolloutStep,
    TrainingResult,
    evaluate,
    observe,
    rollout_step,
    train,
)

__all__ = [
    'DdpgAgent',
    'TrainStats',
    'load_actor',
    'Batch',
    'ReplayBuffer',
    'CURVE_COLUMNS',
    'CurvePoint',
    'EvalResult',
    'RolloutStep',
    'TrainingResult',
    'evaluate',
    'observe',
    'rollout_step',
    'train',
]
