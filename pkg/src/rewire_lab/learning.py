"""Online back-propagation for rewired feed-forward DAGs.

Training minimizes the squared error 0.5 * sum((target - output)^2) with one
single-pattern gradient update per iteration, patterns presented cyclically.
Mean absolute error is the reporting metric. Every non-input neuron applies a
logistic sigmoid to its bias plus the weighted sum of incoming activations;
rewired edges may skip layers, and neurons left without incoming edges simply
hold the constant activation sigmoid(bias).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .topology import RewiredGraph


def sigmoid(x: np.ndarray) -> np.ndarray:
    # clip keeps exp() finite; sigmoid(+-60) already saturates double precision
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


@dataclass(eq=False)
class Pattern:
    """One training example: binary input and binary target, both of width n."""

    input: np.ndarray
    target: np.ndarray

    def __post_init__(self) -> None:
        self.input = np.asarray(self.input, dtype=float)
        self.target = np.asarray(self.target, dtype=float)
        if self.input.ndim != 1 or self.target.ndim != 1:
            raise ValueError("pattern input and target must be 1-d vectors")
        if self.input.shape != self.target.shape:
            raise ValueError("pattern input and target must have equal length")
        for name, vec in (("input", self.input), ("target", self.target)):
            if not np.isin(vec, (0.0, 1.0)).all():
                raise ValueError(f"pattern {name} entries must be 0 or 1")


@dataclass(eq=False)
class TrainingSet:
    """Ordered list of patterns plus the seed they were generated from."""

    patterns: tuple[Pattern, ...]
    seed: int

    def __post_init__(self) -> None:
        if not self.patterns:
            raise ValueError("training set must contain at least one pattern")
        width = len(self.patterns[0].input)
        if any(len(p.input) != width for p in self.patterns):
            raise ValueError("all patterns must share the same width")

    @property
    def width(self) -> int:
        return len(self.patterns[0].input)


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters for one training run.

    `init_range` and `seed` describe how fresh networks are initialized; they
    are consumed wherever networks are created (see init_weights), while
    train() itself uses the learning rate, iteration count, and checkpoints.
    """

    learning_rate: float
    iterations: int
    checkpoints: tuple[int, ...]
    init_range: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not self.checkpoints:
            raise ValueError("checkpoints must be nonempty")
        if list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ValueError("checkpoints must be strictly ascending")
        if self.checkpoints[0] < 1 or self.checkpoints[-1] > self.iterations:
            raise ValueError("checkpoints must lie in [1, iterations]")


@dataclass(eq=False)
class TrainingResult:
    """MAE measured at each requested checkpoint plus after the final iteration."""

    mae_at_checkpoint: dict[int, float]
    final_mae: float


class WeightedNetwork:
    """Trainable weights and biases attached to a rewired graph.

    `weights` is a dense node-by-node matrix that is nonzero only on edges of
    the graph (the boolean `mask` pins that support); `biases` has one entry
    per neuron with the input layer fixed at zero. Training mutates both
    arrays in place, so a network must not be shared across concurrent runs.
    """

    def __init__(self, graph: RewiredGraph, weights: np.ndarray, biases: np.ndarray):
        count = graph.node_count
        if weights.shape != (count, count):
            raise ValueError(f"weights must be {(count, count)}, got {weights.shape}")
        if biases.shape != (count,):
            raise ValueError(f"biases must be ({count},), got {biases.shape}")
        self.graph = graph
        self.weights = weights
        self.biases = biases
        self.mask = np.zeros((count, count), dtype=bool)
        if graph.edges:
            src, dst = np.array(graph.edges).T
            self.mask[src, dst] = True

        n = graph.shape.neurons_per_layer
        self._n = n
        self._layer_slices = [
            slice(layer * n, (layer + 1) * n) for layer in range(graph.shape.layers)
        ]

    @property
    def input_width(self) -> int:
        return self._n

    @property
    def output_slice(self) -> slice:
        return self._layer_slices[-1]


def init_weights(graph: RewiredGraph, init_range: float, seed: int) -> WeightedNetwork:
    """Fresh network with weights and biases uniform in [-init_range, init_range].

    Weights are drawn per edge in ascending edge order, then biases for all
    non-input neurons in flat-id order, so the draw is deterministic in seed.
    """
    if init_range <= 0:
        raise ValueError(f"init_range must be > 0, got {init_range}")
    rng = np.random.default_rng(seed)
    count = graph.node_count
    n = graph.shape.neurons_per_layer

    weights = np.zeros((count, count))
    if graph.edges:
        values = rng.uniform(-init_range, init_range, size=len(graph.edges))
        src, dst = np.array(graph.edges).T
        weights[src, dst] = values
    biases = np.zeros(count)
    biases[n:] = rng.uniform(-init_range, init_range, size=count - n)
    return WeightedNetwork(graph, weights, biases)


def generate_patterns(n: int, count: int, seed: int) -> TrainingSet:
    """Random binary input/target patterns, each bit uniform over {0, 1}."""
    if n < 1 or count < 1:
        raise ValueError("pattern width and count must both be >= 1")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(count, 2, n)).astype(float)
    patterns = tuple(Pattern(bits[i, 0], bits[i, 1]) for i in range(count))
    return TrainingSet(patterns=patterns, seed=seed)


def forward(net: WeightedNetwork, input_bits: Sequence[float]) -> np.ndarray:
    """Activations of every neuron; layer 0 equals the input verbatim."""
    x = np.asarray(input_bits, dtype=float)
    if x.shape != (net.input_width,):
        raise ValueError(f"input must have length {net.input_width}, got {x.shape}")
    activations = np.zeros(net.graph.node_count)
    activations[net._layer_slices[0]] = x
    for sl in net._layer_slices[1:]:
        activations[sl] = sigmoid(activations @ net.weights[:, sl] + net.biases[sl])
    return activations


def loss_and_gradients(
    net: WeightedNetwork, pattern: Pattern
) -> tuple[float, np.ndarray, np.ndarray]:
    """Squared-error loss and its gradients w.r.t. every weight and bias."""
    activations = forward(net, pattern.input)
    out = net.output_slice
    y = activations[out]
    err = y - pattern.target
    loss = 0.5 * float(err @ err)

    # delta[j] = dLoss/dz_j, filled in descending layer order over the DAG
    delta = np.zeros(net.graph.node_count)
    delta[out] = err * y * (1.0 - y)
    for sl in net._layer_slices[-2:0:-1]:
        a = activations[sl]
        delta[sl] = (net.weights[sl, :] @ delta) * a * (1.0 - a)

    grad_w = np.outer(activations, delta)
    grad_w *= net.mask
    grad_b = delta.copy()
    grad_b[net._layer_slices[0]] = 0.0
    return loss, grad_w, grad_b


def backprop_step(net: WeightedNetwork, pattern: Pattern, learning_rate: float) -> float:
    """One online gradient-descent update; returns the pre-update loss."""
    loss, grad_w, grad_b = loss_and_gradients(net, pattern)
    net.weights -= learning_rate * grad_w
    net.biases -= learning_rate * grad_b
    return loss


def mean_absolute_error(net: WeightedNetwork, training_set: TrainingSet) -> float:
    """Mean of |target - output| over all patterns and all output neurons."""
    out = net.output_slice
    total = 0.0
    for pattern in training_set.patterns:
        y = forward(net, pattern.input)[out]
        total += float(np.abs(pattern.target - y).mean())
    return total / len(training_set.patterns)


def train(
    net: WeightedNetwork, training_set: TrainingSet, cfg: TrainingConfig
) -> TrainingResult:
    """Run cfg.iterations online updates, recording MAE at each checkpoint.

    One iteration is a single back-propagation step on a single pattern;
    patterns cycle in list order.
    """
    if training_set.width != net.input_width:
        raise ValueError(
            f"training set width {training_set.width} does not match "
            f"network input width {net.input_width}"
        )
    checkpoints = set(cfg.checkpoints)
    patterns = training_set.patterns
    mae_at: dict[int, float] = {}
    for t in range(1, cfg.iterations + 1):
        backprop_step(net, patterns[(t - 1) % len(patterns)], cfg.learning_rate)
        if t in checkpoints:
            mae_at[t] = mean_absolute_error(net, training_set)
    final = mae_at.get(cfg.iterations)
    if final is None:
        final = mean_absolute_error(net, training_set)
    return TrainingResult(mae_at_checkpoint=mae_at, final_mae=final)
