"""Network structures, activations and forward-pass semantics.

Both network families are three-layer perceptrons with tansig hidden layers
and a purelin output; the Elman variant additionally feeds a copy of the
previous first-layer activations (the context units) back into layer 1.
All functions here are pure: a :class:`NetworkState` is a plain value that
is never mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

FEEDFORWARD = "feedforward"
ELMAN = "elman"
FAMILIES = (FEEDFORWARD, ELMAN)

TANSIG = "tansig"
PURELIN = "purelin"
ACTIVATION_KINDS = (TANSIG, PURELIN)

#: Hidden layers are tansig, the single output neuron is purelin.
DEFAULT_ACTIVATIONS = (TANSIG, TANSIG, PURELIN)

#: Half-width of the uniform interval weights and biases are drawn from.
INIT_SCALE = 0.5


def activate(kind: str, x):
    """Apply an activation to a scalar or array.

    tansig is the exact hyperbolic tangent (2/(1+e^(-2x)) - 1), purelin is
    the identity.
    """
    if kind == TANSIG:
        return np.tanh(x)
    if kind == PURELIN:
        return x
    raise ValueError(f"unknown activation kind: {kind!r}")


def activation_derivative(kind: str, output):
    """Derivative of an activation expressed through its own output."""
    if kind == TANSIG:
        return 1.0 - output * output
    if kind == PURELIN:
        return np.ones_like(output)
    raise ValueError(f"unknown activation kind: {kind!r}")


@dataclass(frozen=True)
class StructureSpec:
    """Neuron counts of one three-layer structure.

    The five catalog entries carry their catalog number; ad-hoc structures
    (used e.g. for degenerate diagnostic networks) leave it as None.
    """

    layer1_neurons: int
    layer2_neurons: int
    output_neurons: int = 1
    network_number: int | None = None

    def __post_init__(self):
        for name in ("layer1_neurons", "layer2_neurons", "output_neurons"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def layer_sizes(self) -> tuple[int, int, int]:
        return (self.layer1_neurons, self.layer2_neurons, self.output_neurons)


STRUCTURE_CATALOG: dict[int, StructureSpec] = {
    1: StructureSpec(3, 3, 1, network_number=1),
    2: StructureSpec(3, 5, 1, network_number=2),
    3: StructureSpec(5, 7, 1, network_number=3),
    4: StructureSpec(9, 5, 1, network_number=4),
    5: StructureSpec(12, 10, 1, network_number=5),
}


def catalog_structure(network_number: int) -> StructureSpec:
    """Look up one of the five catalog structures by its number."""
    try:
        return STRUCTURE_CATALOG[network_number]
    except KeyError:
        raise ValueError(
            f"network_number must be in 1..5, got {network_number}"
        ) from None


@dataclass
class NetworkState:
    """Weights, biases and (for Elman) context of one network.

    weights[0] is layer1_neurons x input_count, weights[1] is
    layer2_neurons x layer1_neurons and weights[2] is
    output_neurons x layer2_neurons; biases match the row counts.
    """

    family: str
    structure: StructureSpec
    input_count: int
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activations: tuple[str, str, str] = DEFAULT_ACTIVATIONS
    recurrent_weights: np.ndarray | None = None
    context: np.ndarray | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family: {self.family!r}")
        if self.input_count < 1:
            raise ValueError("input_count must be positive")
        for kind in self.activations:
            if kind not in ACTIVATION_KINDS:
                raise ValueError(f"unknown activation kind: {kind!r}")
        h1, h2, out = self.structure.layer_sizes
        expected = [(h1, self.input_count), (h2, h1), (out, h2)]
        if len(self.weights) != 3 or len(self.biases) != 3:
            raise ValueError("exactly three weight matrices and bias vectors required")
        for i, ((rows, cols), w, b) in enumerate(zip(expected, self.weights, self.biases)):
            if w.shape != (rows, cols):
                raise ValueError(
                    f"layer {i + 1} weights must have shape {(rows, cols)}, got {w.shape}"
                )
            if b.shape != (rows,):
                raise ValueError(
                    f"layer {i + 1} biases must have shape {(rows,)}, got {b.shape}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i + 1} parameters contain non-finite values")
        if self.family == ELMAN:
            if self.recurrent_weights is None or self.context is None:
                raise ValueError("Elman networks need recurrent_weights and context")
            if self.recurrent_weights.shape != (h1, h1):
                raise ValueError(
                    f"recurrent weights must have shape {(h1, h1)}, "
                    f"got {self.recurrent_weights.shape}"
                )
            if self.context.shape != (h1,):
                raise ValueError(f"context must have shape {(h1,)}")
            if not (
                np.all(np.isfinite(self.recurrent_weights))
                and np.all(np.isfinite(self.context))
            ):
                raise ValueError("recurrent parameters contain non-finite values")
        else:
            if self.recurrent_weights is not None or self.context is not None:
                raise ValueError("feedforward networks carry no recurrent state")

    def copy(self) -> "NetworkState":
        return replace(
            self,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            recurrent_weights=(
                None if self.recurrent_weights is None else self.recurrent_weights.copy()
            ),
            context=None if self.context is None else self.context.copy(),
        )


def initialize(
    family: str,
    structure: StructureSpec,
    input_count: int,
    seed: int,
    activations: tuple[str, str, str] = DEFAULT_ACTIVATIONS,
) -> NetworkState:
    """Create a fresh network with seeded uniform [-0.5, 0.5] parameters.

    The draw order is fixed (W1, b1, W2, b2, W3, b3, then the recurrent
    matrix for Elman) so a given seed always yields the same state.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family: {family!r}")
    rng = np.random.default_rng(seed)
    h1, h2, out = structure.layer_sizes
    shapes = [(h1, input_count), (h2, h1), (out, h2)]
    weights = []
    biases = []
    for rows, cols in shapes:
        weights.append(rng.uniform(-INIT_SCALE, INIT_SCALE, (rows, cols)))
        biases.append(rng.uniform(-INIT_SCALE, INIT_SCALE, rows))
    recurrent = None
    context = None
    if family == ELMAN:
        recurrent = rng.uniform(-INIT_SCALE, INIT_SCALE, (h1, h1))
        context = np.zeros(h1)
    return NetworkState(
        family=family,
        structure=structure,
        input_count=input_count,
        weights=weights,
        biases=biases,
        activations=activations,
        recurrent_weights=recurrent,
        context=context,
    )


def _check_input(net: NetworkState, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_count,):
        raise ValueError(
            f"input must have shape {(net.input_count,)}, got {x.shape}"
        )
    return x


def forward_feedforward(net: NetworkState, x: Sequence[float]) -> float:
    """Single forward pass of a feedforward network, returning the scalar output."""
    if net.family != FEEDFORWARD:
        raise ValueError("forward_feedforward requires a feedforward network")
    x = _check_input(net, x)
    a = x
    for w, b, kind in zip(net.weights, net.biases, net.activations):
        a = activate(kind, w @ a + b)
    return float(a[0])


def forward_feedforward_batch(net: NetworkState, inputs: np.ndarray) -> np.ndarray:
    """Vectorized feedforward pass over the rows of ``inputs``."""
    if net.family != FEEDFORWARD:
        raise ValueError("forward_feedforward_batch requires a feedforward network")
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != net.input_count:
        raise ValueError(
            f"inputs must have shape (n, {net.input_count}), got {inputs.shape}"
        )
    a = inputs
    for w, b, kind in zip(net.weights, net.biases, net.activations):
        a = activate(kind, a @ w.T + b)
    return a[:, 0]


def forward_elman(
    net: NetworkState,
    x: Sequence[float],
    context: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """One Elman step: returns (output, new_context) without mutating the net.

    ``context`` defaults to the context stored on the network; committing the
    returned context back into a state is the caller's choice.
    """
    if net.family != ELMAN:
        raise ValueError("forward_elman requires an Elman network")
    x = _check_input(net, x)
    if context is None:
        context = net.context
    context = np.asarray(context, dtype=float)
    h1 = net.structure.layer1_neurons
    if context.shape != (h1,):
        raise ValueError(f"context must have shape {(h1,)}, got {context.shape}")
    hidden = activate(
        net.activations[0],
        net.weights[0] @ x + net.recurrent_weights @ context + net.biases[0],
    )
    a = activate(net.activations[1], net.weights[1] @ hidden + net.biases[1])
    out = activate(net.activations[2], net.weights[2] @ a + net.biases[2])
    return float(out[0]), hidden
