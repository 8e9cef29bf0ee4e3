"""
Finite-difference verification of :meth:`Mlp.backward`.

Every case builds a random float64 network, evaluates the scalar loss
``sum(upstream * forward(x))`` and compares analytic gradients against
central differences. Large networks are checked on a random sample of
parameters. When a perturbation flips a ReLU on or off the difference is
retaken with a much smaller step; if the kink is still crossed the
parameter is skipped and counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pyrunshaper.core.features.observation import OBSERVATION_SIZE
from pyrunshaper.core.neural.mlp import ForwardCache, Head, Mlp
from pyrunshaper.core.sim.biped import N_JOINTS
from pyrunshaper.logging.setup import get_logger

logger = get_logger(__name__)

# (hidden layers, neurons per layer)
DEFAULT_TOPOLOGIES = ((2, 8), (3, 32), (5, 128))
FALLBACK_STEP = 1e-6
BATCH_ROWS = 4


@dataclass(frozen=True)
class GradcheckResult:
    layers: int
    width: int
    cases: int
    max_relative_error: float
    tolerance: float
    skipped_params: int

    @property
    def passed(self) -> bool:
        return self.max_relative_error < self.tolerance

    @property
    def label(self) -> str:
        return f"{self.layers}x{self.width}"


def _loss_and_masks(net: Mlp, x: np.ndarray,
                    upstream: np.ndarray) -> tuple[float, list[np.ndarray]]:
    cache = ForwardCache()
    out = net.forward(x, cache)
    return float(np.sum(upstream * out)), cache.relu_masks()


def _same_masks(a: list[np.ndarray], b: list[np.ndarray]) -> bool:
    return all(np.array_equal(m1, m2) for m1, m2 in zip(a, b))


def _central_difference(net: Mlp, array: np.ndarray, index: int, x: np.ndarray,
                        upstream: np.ndarray, base_masks: list[np.ndarray],
                        step: float) -> float | None:
    """Central difference for one entry, or None if a ReLU kink is crossed."""
    original = array.flat[index]
    for h in (step, FALLBACK_STEP):
        array.flat[index] = original + h
        loss_plus, masks_plus = _loss_and_masks(net, x, upstream)
        array.flat[index] = original - h
        loss_minus, masks_minus = _loss_and_masks(net, x, upstream)
        array.flat[index] = original
        if _same_masks(masks_plus, base_masks) and _same_masks(masks_minus, base_masks):
            return (loss_plus - loss_minus) / (2.0 * h)
    return None


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """``|a - n| / (|a| + |n|)`` over whole vectors; 0 when both vanish."""
    denominator = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if denominator == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / denominator)


def check_case(net: Mlp, x: np.ndarray, upstream: np.ndarray, step: float,
               max_params: int, rng: np.random.Generator) -> tuple[float, int]:
    """
    Compare parameter and input gradients of one network against finite
    differences.

    Args:
        net: float64 network
        x: Input batch
        upstream: Output-gradient batch defining the scalar loss
        step: Central-difference step
        max_params: Maximum number of parameters to check
        rng: Sampler for the parameter subset

    Returns:
        (relative error, number of skipped entries)
    """
    grads, input_grad = net.backward(x, upstream)
    _, base_masks = _loss_and_masks(net, x, upstream)

    params = net.parameters()
    analytic_params = grads.as_list()
    sizes = np.array([p.size for p in params])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    chosen = (np.arange(total) if total <= max_params
              else np.sort(rng.choice(total, size=max_params, replace=False)))

    analytic, numeric = [], []
    skipped = 0
    for flat in chosen:
        k = int(np.searchsorted(offsets, flat, side="right") - 1)
        j = int(flat - offsets[k])
        value = _central_difference(net, params[k], j, x, upstream, base_masks, step)
        if value is None:
            skipped += 1
            continue
        analytic.append(analytic_params[k].flat[j])
        numeric.append(value)

    x_work = x.copy()
    for j in range(x_work.size):
        value = _central_difference(net, x_work, j, x_work, upstream, base_masks, step)
        if value is None:
            skipped += 1
            continue
        analytic.append(input_grad.flat[j])
        numeric.append(value)

    return relative_error(np.array(analytic), np.array(numeric)), skipped


def run_gradcheck(cases: int = 20, max_params: int = 256, step: float = 1e-3,
                  tolerance: float = 1e-4,
                  topologies: tuple[tuple[int, int], ...] = DEFAULT_TOPOLOGIES,
                  input_dim: int = OBSERVATION_SIZE, output_dim: int = N_JOINTS,
                  seed: int = 0) -> list[GradcheckResult]:
    """
    Run the gradient-check suite.

    Cases alternate between tanh and identity heads.

    Returns:
        One result per topology
    """
    rng = np.random.default_rng(seed)
    results = []
    for layers, width in topologies:
        worst = 0.0
        skipped_total = 0
        for case in range(cases):
            head = Head.TANH if case % 2 == 0 else Head.IDENTITY
            net = Mlp([input_dim] + [width] * layers + [output_dim], head=head,
                      dtype=np.float64, seed=int(rng.integers(2**31)))
            x = rng.standard_normal((BATCH_ROWS, input_dim))
            upstream = rng.standard_normal((BATCH_ROWS, output_dim))
            error, skipped = check_case(net, x, upstream, step, max_params, rng)
            worst = max(worst, error)
            skipped_total += skipped
        result = GradcheckResult(layers, width, cases, worst, tolerance, skipped_total)
        logger.info(
            f"gradcheck {result.label}: max relative error {worst:.3e} over "
            f"{cases} cases ({skipped_total} kink-crossing entries skipped)")
        results.append(result)
    return results
