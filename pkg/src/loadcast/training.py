"""Mean-squared-error backpropagation training for both network families.

Feedforward training is plain full-batch gradient descent; Elman training
walks the rows in chronological order once per epoch, carrying the context
across rows (reset to zero at every epoch start) and applying one
batch-accumulated update per epoch. The per-epoch error curve records the
training MSE of the weights after each update, so the last curve entry
always describes the returned network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import WindowedDataset
from .errors import DivergenceError, TrainingFailedError
from .networks import (
    DEFAULT_ACTIVATIONS,
    ELMAN,
    FEEDFORWARD,
    NetworkState,
    StructureSpec,
    activate,
    activation_derivative,
    initialize,
)

_ACT_CODES = {"tansig": _kernels.ACT_TANSIG, "purelin": _kernels.ACT_PURELIN}


@dataclass(frozen=True)
class TrainConfig:
    """Knobs of one training run.

    ``seed`` numbers the restart initializations (seed, seed+1, ...);
    ``bptt_truncation`` only affects Elman training (depth 1 treats the
    context as a constant input). A zero learning rate is allowed and
    simply freezes the parameters.
    """

    epochs: int = 2000
    error_goal: float = 1e-10
    learning_rate: float = 0.01
    restarts: int = 10
    seed: int = 0
    bptt_truncation: int = 1

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not self.error_goal > 0:
            raise ValueError("error_goal must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.bptt_truncation < 1:
            raise ValueError("bptt_truncation must be at least 1")


@dataclass
class TrainResult:
    best: NetworkState
    error_curve: np.ndarray
    stopped_at_epoch: int
    goal_reached: bool
    restart_errors: np.ndarray

    @property
    def final_error(self) -> float:
        return float(self.error_curve[-1])


def mse(predictions, targets) -> float:
    """Mean squared error between two equal-length vectors."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape or predictions.ndim != 1 or predictions.size == 0:
        raise ValueError(
            f"predictions and targets must be equal-length non-empty vectors, "
            f"got {predictions.shape} and {targets.shape}"
        )
    diff = predictions - targets
    return float(diff @ diff) / diff.size


# --- feedforward batch passes -------------------------------------------------

def _ff_predictions(params, acts, X):
    W1, b1, W2, b2, W3, b3 = params
    a1 = activate(acts[0], X @ W1.T + b1)
    a2 = activate(acts[1], a1 @ W2.T + b2)
    return activate(acts[2], a2 @ W3.T + b3)[:, 0]


def _ff_loss(params, acts, X, y):
    e = _ff_predictions(params, acts, X) - y
    return float(e @ e) / y.size


def _ff_loss_and_grads(params, acts, X, y):
    W1, b1, W2, b2, W3, b3 = params
    A1 = activate(acts[0], X @ W1.T + b1)
    A2 = activate(acts[1], A1 @ W2.T + b2)
    preds = activate(acts[2], A2 @ W3.T + b3)[:, 0]
    n = y.size
    e = preds - y
    loss = float(e @ e) / n
    d3 = (2.0 / n) * e * activation_derivative(acts[2], preds)
    gW3 = (d3 @ A2)[None, :]
    gb3 = np.array([d3.sum()])
    d2 = np.outer(d3, W3[0]) * activation_derivative(acts[1], A2)
    gW2 = d2.T @ A1
    gb2 = d2.sum(axis=0)
    d1 = (d2 @ W2) * activation_derivative(acts[0], A1)
    gW1 = d1.T @ X
    gb1 = d1.sum(axis=0)
    return loss, [gW1, gb1, gW2, gb2, gW3, gb3]


# --- shared descent driver ----------------------------------------------------

def _descend(params, loss_and_grads, loss_fn, cfg: TrainConfig):
    curve = np.empty(cfg.epochs)
    count = 0
    goal_reached = False
    for epoch in range(1, cfg.epochs + 1):
        loss_before, grads = loss_and_grads(params)
        if not np.isfinite(loss_before):
            raise DivergenceError(epoch)
        params = [p - cfg.learning_rate * g for p, g in zip(params, grads)]
        loss = loss_fn(params)
        curve[count] = loss
        count += 1
        if not np.isfinite(loss):
            raise DivergenceError(epoch)
        if loss <= cfg.error_goal:
            goal_reached = True
            break
    return params, curve[:count].copy(), count, goal_reached


def _single_result(net: NetworkState, curve, stopped, goal) -> TrainResult:
    return TrainResult(
        best=net,
        error_curve=curve,
        stopped_at_epoch=stopped,
        goal_reached=goal,
        restart_errors=np.array([curve[-1]]),
    )


def _check_pair(net: NetworkState, dataset: WindowedDataset, family: str) -> None:
    if net.family != family:
        raise ValueError(f"expected a {family} network, got {net.family}")
    if net.structure.output_neurons != 1:
        raise ValueError("training supports single-output networks only")
    if dataset.spec.input_count != net.input_count:
        raise ValueError(
            f"dataset provides {dataset.spec.input_count} inputs per row "
            f"but the network expects {net.input_count}"
        )
    if len(dataset) == 0:
        raise ValueError("dataset is empty")


def backprop_feedforward(
    net: NetworkState, dataset: WindowedDataset, cfg: TrainConfig
) -> TrainResult:
    """Full-batch gradient descent on MSE, starting from ``net``'s weights."""
    _check_pair(net, dataset, FEEDFORWARD)
    X = np.ascontiguousarray(dataset.inputs)
    y = np.ascontiguousarray(dataset.targets)
    acts = net.activations
    params0 = [a.copy() for pair in zip(net.weights, net.biases) for a in pair]
    params, curve, stopped, goal = _descend(
        params0,
        lambda ps: _ff_loss_and_grads(ps, acts, X, y),
        lambda ps: _ff_loss(ps, acts, X, y),
        cfg,
    )
    trained = NetworkState(
        family=FEEDFORWARD,
        structure=net.structure,
        input_count=net.input_count,
        weights=[params[0], params[2], params[4]],
        biases=[params[1], params[3], params[5]],
        activations=acts,
    )
    return _single_result(trained, curve, stopped, goal)


def _elman_params(net: NetworkState) -> list[np.ndarray]:
    return [
        np.ascontiguousarray(net.weights[0]).copy(),
        net.biases[0].copy(),
        np.ascontiguousarray(net.recurrent_weights).copy(),
        np.ascontiguousarray(net.weights[1]).copy(),
        net.biases[1].copy(),
        np.ascontiguousarray(net.weights[2]).copy(),
        net.biases[2].copy(),
    ]


def backprop_elman(
    net: NetworkState,
    dataset: WindowedDataset,
    cfg: TrainConfig,
    freeze_recurrent: bool = False,
) -> TrainResult:
    """Sequence-ordered Elman training with truncated backprop through time.

    ``freeze_recurrent`` pins the recurrent matrix (useful to compare against
    feedforward training with the recurrence disabled).
    """
    _check_pair(net, dataset, ELMAN)
    X = np.ascontiguousarray(dataset.inputs)
    y = np.ascontiguousarray(dataset.targets)
    codes = tuple(_ACT_CODES[a] for a in net.activations)
    h1 = net.structure.layer1_neurons
    ctx0 = np.zeros(h1)
    trunc = cfg.bptt_truncation

    def loss_and_grads(ps):
        loss, gW1, gb1, gR, gW2, gb2, gW3, gb3 = _kernels.elman_epoch_grads(
            ps[0], ps[1], ps[2], ps[3], ps[4], ps[5], ps[6],
            codes[0], codes[1], codes[2], X, y, ctx0, trunc,
        )
        grads = [gW1, gb1, gR, gW2, gb2, gW3, gb3]
        if freeze_recurrent:
            grads[2] = np.zeros_like(grads[2])
        return loss, grads

    def loss_fn(ps):
        return _kernels.elman_sequence_loss(
            ps[0], ps[1], ps[2], ps[3], ps[4], ps[5], ps[6],
            codes[0], codes[1], codes[2], X, y, ctx0,
        )

    params, curve, stopped, goal = _descend(
        _elman_params(net), loss_and_grads, loss_fn, cfg
    )
    trained = NetworkState(
        family=ELMAN,
        structure=net.structure,
        input_count=net.input_count,
        weights=[params[0], params[3], params[5]],
        biases=[params[1], params[4], params[6]],
        activations=net.activations,
        recurrent_weights=params[2],
        context=np.zeros(h1),
    )
    return _single_result(trained, curve, stopped, goal)


def train_multi_restart(
    family: str,
    structure: StructureSpec,
    dataset: WindowedDataset,
    cfg: TrainConfig,
    activations: tuple[str, str, str] = DEFAULT_ACTIVATIONS,
) -> TrainResult:
    """Train ``cfg.restarts`` fresh networks and keep the lowest-error one.

    Restart r initializes with seed cfg.seed + r. Diverged restarts rank
    last (error +inf); ties go to the lowest seed.
    """
    results: list[TrainResult | None] = []
    errors: list[float] = []
    train = backprop_feedforward if family == FEEDFORWARD else backprop_elman
    for r in range(cfg.restarts):
        net0 = initialize(family, structure, dataset.spec.input_count, cfg.seed + r, activations)
        try:
            result = train(net0, dataset, cfg)
        except DivergenceError:
            results.append(None)
            errors.append(np.inf)
        else:
            results.append(result)
            errors.append(result.final_error)
    best_index = int(np.argmin(errors))
    if not np.isfinite(errors[best_index]):
        raise TrainingFailedError(f"all {cfg.restarts} restarts diverged")
    best = results[best_index]
    assert best is not None
    return TrainResult(
        best=best.best,
        error_curve=best.error_curve,
        stopped_at_epoch=best.stopped_at_epoch,
        goal_reached=best.goal_reached,
        restart_errors=np.array(errors),
    )


def gradient_check(
    net: NetworkState,
    x,
    target: float,
    context: np.ndarray | None = None,
) -> float:
    """Compare analytic vs central-difference gradients on one sample.

    The analytic side is exactly the code path training uses (truncation 1
    for Elman, with the supplied context treated as a constant input).
    Returns the worst relative discrepancy over every parameter entry.
    """
    x = np.asarray(x, dtype=float)
    X = np.ascontiguousarray(x[None, :])
    y = np.array([float(target)])
    if net.family == FEEDFORWARD:
        acts = net.activations
        params = [a.copy() for pair in zip(net.weights, net.biases) for a in pair]
        _, analytic = _ff_loss_and_grads(params, acts, X, y)

        def loss_fn(ps):
            return _ff_loss(ps, acts, X, y)
    else:
        codes = tuple(_ACT_CODES[a] for a in net.activations)
        h1 = net.structure.layer1_neurons
        ctx = np.zeros(h1) if context is None else np.asarray(context, dtype=float)
        params = _elman_params(net)
        _, *analytic = _kernels.elman_epoch_grads(
            params[0], params[1], params[2], params[3], params[4], params[5], params[6],
            codes[0], codes[1], codes[2], X, y, ctx, 1,
        )

        def loss_fn(ps):
            return _kernels.elman_sequence_loss(
                ps[0], ps[1], ps[2], ps[3], ps[4], ps[5], ps[6],
                codes[0], codes[1], codes[2], X, y, ctx,
            )

    h = 1e-5
    worst = 0.0
    for p, grad in zip(params, analytic):
        for idx in np.ndindex(p.shape):
            original = p[idx]
            p[idx] = original + h
            loss_plus = loss_fn(params)
            p[idx] = original - h
            loss_minus = loss_fn(params)
            p[idx] = original
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            analytic_value = float(grad[idx])
            denom = max(abs(analytic_value), abs(numeric), 1e-8)
            worst = max(worst, abs(analytic_value - numeric) / denom)
    return worst
