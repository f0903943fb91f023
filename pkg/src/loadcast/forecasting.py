"""Multi-step load forecasts from a trained network plus evaluation metrics.

Forecasting is recursive: each predicted hour is appended to the working
history and fed back through the lag window for the following steps. Elman
context is warmed by stepping once through the supplied true history, then
carried through the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .dataset import (
    HOUR,
    HOURS_PER_WEEK,
    LoadSeries,
    NormParams,
    WindowSpec,
    denormalize,
    lag_matrix,
    normalize,
)
from .errors import InsufficientDataError
from .networks import ELMAN, NetworkState, forward_elman, forward_feedforward


@dataclass(frozen=True)
class MetricSet:
    mse: float
    mape: float
    max_abs_error: float


def evaluate(predicted, actual) -> MetricSet:
    """MSE, MAPE (percent) and worst absolute error between two kW vectors."""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.shape != actual.shape or predicted.ndim != 1 or predicted.size == 0:
        raise ValueError(
            f"predicted and actual must be equal-length non-empty vectors, "
            f"got {predicted.shape} and {actual.shape}"
        )
    if np.any(actual <= 0):
        raise ValueError("MAPE requires strictly positive actual values")
    abs_err = np.abs(predicted - actual)
    return MetricSet(
        mse=float(np.mean(abs_err * abs_err)),
        mape=float(np.mean(abs_err / actual) * 100.0),
        max_abs_error=float(abs_err.max()),
    )


@dataclass(frozen=True)
class ForecastResult:
    horizon_hours: int
    start: datetime
    predicted: np.ndarray
    actual: np.ndarray | None
    metrics: MetricSet | None

    def timestamp_at(self, index: int) -> datetime:
        return self.start + index * HOUR


def forecast_recursive(
    net: NetworkState,
    norm: NormParams,
    history: LoadSeries,
    spec: WindowSpec,
    horizon_hours: int,
    actual=None,
) -> ForecastResult:
    """Predict ``horizon_hours`` past the end of ``history``.

    Each step normalizes the lag window drawn from the working history,
    runs the network, denormalizes the output back to kW and appends it.
    ``actual`` (optional, length == horizon) adds metrics to the result.
    """
    if horizon_hours < 1:
        raise ValueError("horizon_hours must be at least 1")
    if net.input_count != spec.input_count:
        raise ValueError(
            f"window spec provides {spec.input_count} inputs "
            f"but the network expects {net.input_count}"
        )
    if len(history) < spec.span:
        raise InsufficientDataError(
            f"history of {len(history)} hours is too short for delay={spec.delay}, "
            f"input_count={spec.input_count}; need at least {spec.span} hours"
        )

    context = None
    if net.family == ELMAN:
        context = np.zeros(net.structure.layer1_neurons)
        if len(history) > spec.span:
            warm_inputs, _ = lag_matrix(history.values, spec)
            for row in warm_inputs:
                _, context = forward_elman(net, normalize(row, norm), context)

    work = list(history.values)
    predicted = np.empty(horizon_hours)
    for step in range(horizon_hours):
        k = len(work)
        window = np.array(work[k - spec.span : k - spec.delay + 1])
        window_n = normalize(window, norm)
        if net.family == ELMAN:
            out_n, context = forward_elman(net, window_n, context)
        else:
            out_n = forward_feedforward(net, window_n)
        value = float(denormalize(out_n, norm))
        predicted[step] = value
        work.append(value)

    metrics = None
    actual_arr = None
    if actual is not None:
        actual_arr = np.asarray(actual, dtype=float)
        if actual_arr.shape != (horizon_hours,):
            raise ValueError(
                f"actual must have shape {(horizon_hours,)}, got {actual_arr.shape}"
            )
        metrics = evaluate(predicted, actual_arr)
    return ForecastResult(
        horizon_hours=horizon_hours,
        start=history.end,
        predicted=predicted,
        actual=actual_arr,
        metrics=metrics,
    )


def persistence_baseline(history: LoadSeries, horizon_hours: int) -> np.ndarray:
    """Weekly persistence: each forecast hour repeats the value 168 hours back."""
    if horizon_hours < 1:
        raise ValueError("horizon_hours must be at least 1")
    n = len(history)
    if n < HOURS_PER_WEEK:
        raise InsufficientDataError(
            f"persistence baseline needs at least {HOURS_PER_WEEK} hours of history, got {n}"
        )
    steps = np.arange(horizon_hours)
    return history.values[n - HOURS_PER_WEEK + (steps % HOURS_PER_WEEK)].copy()


def forecast_to_csv(result: ForecastResult) -> str:
    """Overlay CSV: timestamp,predicted_kw[,actual_kw] — directly plottable."""
    has_actual = result.actual is not None
    header = "timestamp,predicted_kw,actual_kw" if has_actual else "timestamp,predicted_kw"
    lines = [header]
    for i in range(result.horizon_hours):
        stamp = result.timestamp_at(i).isoformat()
        if has_actual:
            lines.append(f"{stamp},{result.predicted[i]!r},{result.actual[i]!r}")
        else:
            lines.append(f"{stamp},{result.predicted[i]!r}")
    return "\n".join(lines) + "\n"
