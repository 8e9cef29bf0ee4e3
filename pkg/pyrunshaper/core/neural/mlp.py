"""
Feed-forward networks in numpy.

Weights are stored as ``(fan_in, fan_out)`` matrices so a batch of row
vectors flows through ``x @ W + b``. Hidden layers use ReLU; the output
head is ``tanh`` (actors) or the identity (critics).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from pyrunshaper.core.errors import NonFiniteGradientError, ShapeError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


class Head(str, Enum):
    TANH = "tanh"
    IDENTITY = "identity"


@dataclass
class AdamState:
    """First/second moment buffers (one per parameter array) and step count."""
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: list[np.ndarray]) -> 'AdamState':
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


@dataclass
class ForwardCache:
    """Layer inputs and pre-activations recorded by :meth:`Mlp.forward`."""
    inputs: list[np.ndarray] = field(default_factory=list)
    pre_activations: list[np.ndarray] = field(default_factory=list)
    output: np.ndarray | None = None

    def relu_masks(self) -> list[np.ndarray]:
        """Active-unit masks of the hidden layers."""
        return [z > 0 for z in self.pre_activations[:-1]]


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def as_list(self) -> list[np.ndarray]:
        """Interleaved [dW0, db0, dW1, db1, ...], matching Mlp.parameters()."""
        out = []
        for dw, db in zip(self.weights, self.biases):
            out += [dw, db]
        return out


class Mlp:
    """
    Multi-layer perceptron with its Adam state.

    Args:
        topology: Layer widths, input first and output last
        head: Output activation
        dtype: Parameter storage type (float32 for training, float64 for checks)
        seed: Initialization seed; weights and biases are uniform in
            ``±1/sqrt(fan_in)``
    """

    def __init__(self, topology: list[int], head: Head | str = Head.IDENTITY,
                 dtype: np.dtype | type = np.float32, seed: int = 0):
        if len(topology) < 2 or any(int(w) < 1 for w in topology):
            raise ShapeError(f"Invalid topology {topology}")
        self.topology = [int(w) for w in topology]
        self.head = Head(head)
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.topology[:-1], self.topology[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(
                rng.uniform(-bound, bound, (fan_in, fan_out)).astype(self.dtype))
            self.biases.append(rng.uniform(-bound, bound, fan_out).astype(self.dtype))
        self.adam = AdamState.zeros_like(self.parameters())

    @classmethod
    def from_parameters(cls, weights: list[np.ndarray], biases: list[np.ndarray],
                        head: Head | str = Head.IDENTITY) -> 'Mlp':
        """Build a network around existing parameter arrays."""
        if len(weights) != len(biases) or not weights:
            raise ShapeError("weights and biases must be non-empty and equal in count")
        topology = [weights[0].shape[0]] + [w.shape[1] for w in weights]
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or w.shape[0] != topology[i] or b.shape != (w.shape[1],):
                raise ShapeError(
                    f"Layer {i}: weight {w.shape} / bias {b.shape} do not chain")
        net = cls.__new__(cls)
        net.topology = topology
        net.head = Head(head)
        net.dtype = np.result_type(weights[0])
        net.weights = [np.array(w, dtype=net.dtype) for w in weights]
        net.biases = [np.array(b, dtype=net.dtype) for b in biases]
        net.adam = AdamState.zeros_like(net.parameters())
        return net

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> list[np.ndarray]:
        """Interleaved [W0, b0, W1, b1, ...]; the arrays are live views."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def copy(self) -> 'Mlp':
        net = Mlp.from_parameters([w.copy() for w in self.weights],
                                  [b.copy() for b in self.biases], self.head)
        net.adam = AdamState(m=[m.copy() for m in self.adam.m],
                             v=[v.copy() for v in self.adam.v],
                             step=self.adam.step)
        return net

    def astype(self, dtype: np.dtype | type) -> 'Mlp':
        """Copy of the network with parameters cast to ``dtype``."""
        return Mlp.from_parameters([w.astype(dtype) for w in self.weights],
                                   [b.astype(dtype) for b in self.biases], self.head)

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim not in (1, 2) or x.shape[-1] != self.topology[0]:
            raise ShapeError(
                f"Input must end in {self.topology[0]} values, got shape {x.shape}")
        return x.astype(self.dtype, copy=False)

    def forward(self, x: np.ndarray, cache: ForwardCache | None = None) -> np.ndarray:
        """
        Evaluate the network on a vector or a batch of row vectors.

        Args:
            x: Input of shape (n_in,) or (batch, n_in)
            cache: When given, filled with what :meth:`backward` needs

        Raises:
            ShapeError: If the input width does not match the topology
        """
        a = self._check_input(x)
        last = self.n_layers - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if cache is not None:
                cache.inputs.append(a)
            z = a @ w + b
            if cache is not None:
                cache.pre_activations.append(z)
            if i < last:
                a = np.maximum(z, 0)
            elif self.head is Head.TANH:
                a = np.tanh(z)
            else:
                a = z
        if cache is not None:
            cache.output = a
        return a

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)

    def backward(self, x: np.ndarray, upstream: np.ndarray,
                 cache: ForwardCache | None = None) -> tuple[Gradients, np.ndarray]:
        """
        Reverse-mode gradients of ``sum(upstream * forward(x))``.

        Batch gradients are summed over the batch.

        Args:
            x: Network input, (n_in,) or (batch, n_in)
            upstream: Gradient with respect to the output, same leading shape
            cache: Cache from a forward pass on ``x``; recomputed when absent

        Returns:
            (parameter gradients, gradient with respect to ``x``)

        Raises:
            ShapeError: On inconsistent shapes
        """
        if cache is None:
            cache = ForwardCache()
            self.forward(x, cache)
        upstream = np.asarray(upstream, dtype=self.dtype)
        if upstream.shape != cache.output.shape:
            raise ShapeError(
                f"Upstream gradient shape {upstream.shape} does not match output "
                f"{cache.output.shape}")

        if self.head is Head.TANH:
            delta = upstream * (1.0 - cache.output * cache.output)
        else:
            delta = upstream

        grad_w: list[np.ndarray] = [None] * self.n_layers
        grad_b: list[np.ndarray] = [None] * self.n_layers
        for i in range(self.n_layers - 1, -1, -1):
            a_in = cache.inputs[i]
            if a_in.ndim == 1:
                grad_w[i] = np.outer(a_in, delta)
                grad_b[i] = delta.copy()
            else:
                grad_w[i] = a_in.T @ delta
                grad_b[i] = delta.sum(axis=0)
            delta = delta @ self.weights[i].T
            if i > 0:
                delta = delta * (cache.pre_activations[i - 1] > 0)
        return Gradients(grad_w, grad_b), delta


def adam_step(net: Mlp, grads: Gradients, lr: float) -> Mlp:
    """
    One Adam update in place (beta1 0.9, beta2 0.999, eps 1e-8).

    Args:
        net: Network to update
        grads: Gradients matching ``net.parameters()``
        lr: Learning rate

    Returns:
        The same network, updated

    Raises:
        NonFiniteGradientError: If any gradient is NaN/Inf; nothing is changed
        ShapeError: If gradient shapes do not match the parameters
    """
    params = net.parameters()
    grad_list = grads.as_list()
    if len(grad_list) != len(params):
        raise ShapeError(
            f"Expected {len(params)} gradient arrays, got {len(grad_list)}")
    for p, g in zip(params, grad_list):
        if p.shape != g.shape:
            raise ShapeError(f"Gradient shape {g.shape} != parameter shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError("Refusing Adam update with non-finite gradients")

    state = net.adam
    state.step += 1
    correction1 = 1.0 - ADAM_BETA1 ** state.step
    correction2 = 1.0 - ADAM_BETA2 ** state.step
    for p, g, m, v in zip(params, grad_list, state.m, state.v):
        g = g.astype(p.dtype, copy=False)
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p -= (lr * m_hat / (np.sqrt(v_hat) + ADAM_EPSILON)).astype(p.dtype, copy=False)
    return net


def soft_update(target: Mlp, online: Mlp, tau: float) -> Mlp:
    """
    ``target <- (1 - tau) * target + tau * online``, in place.

    Raises:
        ShapeError: If the topologies differ
    """
    if target.topology != online.topology:
        raise ShapeError(
            f"Topology mismatch: target {target.topology} vs online {online.topology}")
    for t, o in zip(target.parameters(), online.parameters()):
        t[...] = (1.0 - tau) * t + tau * o
    return target
