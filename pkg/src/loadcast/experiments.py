"""Comparative studies: the structure x window grid and the four sweeps.

A full grid covers 5 structures x 7 input counts x 4 delays = 140 cells per
family. Every cell trains with the multi-restart protocol on the training
split and scores a 48-hour recursive forecast against the test split; cells
that fail (too little data, divergence) record the error instead of
aborting the run. Reports are deterministic for a fixed config digest, so
wall-clock fields stay out of the serialized form unless explicitly asked
for.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .dataset import (
    CATALOG_INPUT_COUNTS,
    DELAYS,
    LoadSeries,
    WindowSpec,
    build_windows,
    split,
)
from .errors import DivergenceError, TrainingFailedError
from .forecasting import forecast_recursive
from .networks import ELMAN, FAMILIES, FEEDFORWARD, catalog_structure
from .training import TrainConfig, train_multi_restart

REPORT_SCHEMA_VERSION = 1

#: (input_count, network_number) pairings of the Elman complexity study.
ELMAN_COMPLEXITY_PAIRINGS = ((4, 2), (6, 3), (8, 4), (10, 5))


@dataclass
class GridCell:
    family: str
    network_number: int
    delay: int
    input_count: int
    final_train_mse: float | None = None
    test_mape: float | None = None
    epochs_to_goal: int | None = None
    wall_time_ms: int = 0
    error: str | None = None

    @property
    def key(self) -> tuple[str, int, int, int]:
        return (self.family, self.network_number, self.delay, self.input_count)


@dataclass
class GridReport:
    cells: list[GridCell]
    best_feedforward: GridCell | None
    best_elman: GridCell | None
    generated_at: str | None
    config: dict
    config_digest: str


def grid_keys(families=FAMILIES) -> list[tuple[str, int, int, int]]:
    """Every (family, network_number, delay, input_count) combination."""
    for family in families:
        if family not in FAMILIES:
            raise ValueError(f"unknown family: {family!r}")
    return [
        (family, number, delay, input_count)
        for family in families
        for number in range(1, 6)
        for delay in DELAYS
        for input_count in CATALOG_INPUT_COUNTS
    ]


def _matches(subset: dict | None, family: str, number: int, delay: int, inputs: int) -> bool:
    if not subset:
        return True
    allowed = {
        "family": family,
        "network": number,
        "delay": delay,
        "inputs": inputs,
    }
    for key, wanted in subset.items():
        if key not in allowed:
            raise ValueError(f"unknown filter key: {key!r}")
        values = wanted if isinstance(wanted, (list, tuple, set)) else [wanted]
        if allowed[key] not in values:
            return False
    return True


def _default_timestamp() -> str | None:
    # Wall-clock stamps would break byte-identical reruns, so only emit one
    # when the environment pins it (reproducible-build convention).
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def _config_dict(series: LoadSeries, cfg: TrainConfig, families, subset_filter,
                 train_days, test_days, horizon_hours) -> dict:
    return {
        "families": list(families),
        "filter": subset_filter,
        "train_days": train_days,
        "test_days": test_days,
        "horizon_hours": horizon_hours,
        "epochs": cfg.epochs,
        "error_goal": cfg.error_goal,
        "learning_rate": cfg.learning_rate,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "bptt_truncation": cfg.bptt_truncation,
        "error_metric": "mse",
        "series_start": series.start.isoformat(),
        "series_hours": len(series),
        "series_sha256": hashlib.sha256(series.values.tobytes()).hexdigest(),
    }


def _digest(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()


def run_grid(
    series: LoadSeries,
    cfg: TrainConfig,
    families=FAMILIES,
    subset_filter: dict | None = None,
    train_days: int = 40,
    test_days: int = 21,
    horizon_hours: int = 48,
) -> GridReport:
    """Train and score every selected grid cell.

    ``subset_filter`` maps any of family/network/delay/inputs to a value or
    list of values; unselected cells are skipped entirely. Deterministic
    given cfg.seed and the input series.
    """
    keys = [
        key for key in grid_keys(families) if _matches(subset_filter, *key)
    ]
    if not keys:
        raise ValueError("subset_filter selects no cells")
    train, test = split(series, train_days, test_days)
    if horizon_hours > len(test):
        raise ValueError(
            f"horizon_hours={horizon_hours} exceeds the {len(test)}-hour test split"
        )
    cells = []
    for family, number, delay, inputs in keys:
        cell = GridCell(family=family, network_number=number, delay=delay, input_count=inputs)
        started = time.perf_counter()
        try:
            spec = WindowSpec(delay, inputs)
            windows = build_windows(train, spec)
            result = train_multi_restart(family, catalog_structure(number), windows, cfg)
            forecast = forecast_recursive(
                result.best, windows.norm, train, spec, horizon_hours,
                actual=test.values[:horizon_hours],
            )
            cell.final_train_mse = result.final_error
            cell.test_mape = forecast.metrics.mape
            cell.epochs_to_goal = result.stopped_at_epoch if result.goal_reached else None
        except (ValueError, DivergenceError, TrainingFailedError) as exc:
            cell.error = str(exc)
        cell.wall_time_ms = int(round((time.perf_counter() - started) * 1000.0))
        cells.append(cell)
    if all(cell.error is not None for cell in cells):
        raise TrainingFailedError(
            f"every grid cell failed; first error: {cells[0].error}"
        )
    config = _config_dict(series, cfg, families, subset_filter,
                          train_days, test_days, horizon_hours)
    return GridReport(
        cells=cells,
        best_feedforward=_best_cell(cells, FEEDFORWARD),
        best_elman=_best_cell(cells, ELMAN),
        generated_at=_default_timestamp(),
        config=config,
        config_digest=_digest(config),
    )


def _best_cell(cells, family: str) -> GridCell | None:
    scored = [c for c in cells if c.family == family and c.test_mape is not None]
    if not scored:
        return None
    return min(scored, key=lambda c: (c.test_mape, c.key))


def _cell_dict(cell: GridCell, include_timing: bool) -> dict:
    out = {
        "family": cell.family,
        "network_number": cell.network_number,
        "delay": cell.delay,
        "input_count": cell.input_count,
        "final_train_mse": cell.final_train_mse,
        "test_mape": cell.test_mape,
        "epochs_to_goal": cell.epochs_to_goal,
        "error": cell.error,
    }
    if include_timing:
        out["wall_time_ms"] = cell.wall_time_ms
    return out


def report_to_json(report: GridReport, include_timing: bool = False) -> str:
    """Serialize a report; timing is opt-in because it breaks reproducibility."""
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generated_at": report.generated_at,
        "config": report.config,
        "config_digest": report.config_digest,
        "best": {
            FEEDFORWARD: (
                None if report.best_feedforward is None
                else _cell_dict(report.best_feedforward, include_timing)
            ),
            ELMAN: (
                None if report.best_elman is None
                else _cell_dict(report.best_elman, include_timing)
            ),
        },
        "cells": [_cell_dict(cell, include_timing) for cell in report.cells],
    }
    return json.dumps(payload, indent=2) + "\n"


def verify_report(report: GridReport) -> None:
    """Re-derive the report's winners and uniqueness; raise on inconsistency."""
    keys = [cell.key for cell in report.cells]
    if len(set(keys)) != len(keys):
        raise ValueError("report contains duplicate grid cells")
    for family, recorded in (
        (FEEDFORWARD, report.best_feedforward),
        (ELMAN, report.best_elman),
    ):
        expected = _best_cell(report.cells, family)
        if (expected is None) != (recorded is None):
            raise ValueError(f"winner presence mismatch for {family}")
        if expected is not None and recorded is not None and expected.key != recorded.key:
            raise ValueError(
                f"recorded {family} winner {recorded.key} does not match "
                f"re-derived winner {expected.key}"
            )


# --- sweeps --------------------------------------------------------------------

@dataclass
class SweepCurve:
    label: str
    family: str
    network_number: int
    delay: int
    input_count: int
    error_curve: np.ndarray
    final_error: float
    goal_epoch: int | None

    @property
    def filename(self) -> str:
        return (
            f"curve_{self.family}_n{self.network_number}"
            f"_d{self.delay}_i{self.input_count}.csv"
        )


def _train_curve(series, family, number, delay, inputs, cfg, label) -> SweepCurve:
    spec = WindowSpec(delay, inputs)
    windows = build_windows(series, spec)
    result = train_multi_restart(family, catalog_structure(number), windows, cfg)
    return SweepCurve(
        label=label,
        family=family,
        network_number=number,
        delay=delay,
        input_count=inputs,
        error_curve=result.error_curve,
        final_error=result.final_error,
        goal_epoch=result.stopped_at_epoch if result.goal_reached else None,
    )


def sweep_inputs(
    series: LoadSeries, family: str, network_number: int, delay: int, cfg: TrainConfig
) -> list[SweepCurve]:
    """Fix structure and delay, vary the input count over 2..8."""
    return [
        _train_curve(series, family, network_number, delay, inputs, cfg,
                     label=f"inputs={inputs}")
        for inputs in CATALOG_INPUT_COUNTS
    ]


def sweep_structures(
    series: LoadSeries, family: str, input_count: int, delay: int, cfg: TrainConfig
) -> list[SweepCurve]:
    """Fix input count and delay, vary the structure over the catalog."""
    return [
        _train_curve(series, family, number, delay, input_count, cfg,
                     label=f"network={number}")
        for number in range(1, 6)
    ]


def sweep_delays(
    series: LoadSeries, family: str, network_number: int, input_count: int, cfg: TrainConfig
) -> list[SweepCurve]:
    """Fix structure and input count, vary the delay over 1..4."""
    return [
        _train_curve(series, family, network_number, delay, input_count, cfg,
                     label=f"delay={delay}")
        for delay in DELAYS
    ]


def sweep_complexity_elman(
    series: LoadSeries, cfg: TrainConfig, delay: int = 1
) -> list[SweepCurve]:
    """The four joint structure+input-count Elman pairings, smallest first."""
    return [
        _train_curve(series, ELMAN, number, delay, inputs, cfg,
                     label=f"inputs={inputs},network={number}")
        for inputs, number in ELMAN_COMPLEXITY_PAIRINGS
    ]


def curve_to_csv(curve: SweepCurve) -> str:
    lines = ["epoch,mse"]
    for epoch, value in enumerate(curve.error_curve, start=1):
        lines.append(f"{epoch},{value!r}")
    return "\n".join(lines) + "\n"
