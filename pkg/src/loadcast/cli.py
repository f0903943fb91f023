"""Command-line surface tying the pipeline together.

Exit codes: 0 success, 2 usage errors (unknown flags, missing arguments),
3 file-system errors, 4 CSV parse errors, 5 validation errors (bad values,
too little data), 6 training failures (divergence, all restarts diverged).
Every command writes its outputs atomically, so a failing run leaves no
partial files, and reruns with identical flags produce byte-identical
output.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from datetime import datetime

import click

from .dataset import (
    HOURS_PER_DAY,
    LoadSeries,
    SynthParams,
    WindowSpec,
    build_windows,
    first_hours,
    load_csv,
    save_csv,
    synthesize,
)
from .errors import (
    CsvParseError,
    DivergenceError,
    TrainingFailedError,
)
from .experiments import (
    curve_to_csv,
    report_to_json,
    run_grid,
    sweep_complexity_elman,
    sweep_delays,
    sweep_inputs,
    sweep_structures,
    verify_report,
)
from .fileio import atomic_write_text
from .forecasting import forecast_recursive, forecast_to_csv
from .model_io import ModelBundle, load_model, save_model
from .networks import ELMAN, FAMILIES, FEEDFORWARD, catalog_structure
from .training import (
    TrainConfig,
    backprop_elman,
    backprop_feedforward,
    train_multi_restart,
)

EXIT_IO = 3
EXIT_PARSE = 4
EXIT_VALIDATION = 5
EXIT_TRAINING = 6


def _die(code: int, exc: BaseException) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def friendly_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CsvParseError as exc:
            _die(EXIT_PARSE, exc)
        except (DivergenceError, TrainingFailedError) as exc:
            _die(EXIT_TRAINING, exc)
        except ValueError as exc:
            _die(EXIT_VALIDATION, exc)
        except OSError as exc:
            _die(EXIT_IO, exc)

    return wrapper


def _curve_csv(error_curve) -> str:
    lines = ["epoch,mse"]
    for epoch, value in enumerate(error_curve, start=1):
        lines.append(f"{epoch},{value!r}")
    return "\n".join(lines) + "\n"


@click.group()
def main():
    """Short-term electric load forecasting with small neural networks."""


@main.command()
@click.option("--days", default=61, show_default=True, help="Length of the series in days.")
@click.option("--seed", default=0, show_default=True, help="Generator seed.")
@click.option("--out", required=True, type=click.Path(), help="Output CSV path.")
@click.option("--base-kw", default=500.0, show_default=True)
@click.option("--daily-amplitude-kw", default=125.0, show_default=True)
@click.option("--weekend-factor", default=0.7, show_default=True)
@click.option("--noise-fraction", default=0.02, show_default=True)
@click.option("--start", default="2007-01-04T00:00:00", show_default=True,
              help="First timestamp (ISO, whole hour).")
@friendly_errors
def gen(days, seed, out, base_kw, daily_amplitude_kw, weekend_factor, noise_fraction, start):
    """Generate a synthetic hourly load CSV."""
    params = SynthParams(
        base_kw=base_kw,
        daily_amplitude_kw=daily_amplitude_kw,
        weekend_factor=weekend_factor,
        noise_fraction=noise_fraction,
        start=datetime.fromisoformat(start),
    )
    series = synthesize(days, seed, params)
    save_csv(series, out)
    click.echo(f"wrote {len(series)} hours to {out}")


def _train_options(fn):
    fn = click.option("--epochs", default=2000, show_default=True)(fn)
    fn = click.option("--lr", default=0.01, show_default=True, help="Learning rate.")(fn)
    fn = click.option("--restarts", default=10, show_default=True)(fn)
    fn = click.option("--seed", default=0, show_default=True)(fn)
    fn = click.option("--error-goal", default=1e-10, show_default=True)(fn)
    fn = click.option("--truncation", default=1, show_default=True,
                      help="Backprop-through-time depth (Elman only).")(fn)
    return fn


@main.command()
@click.option("--data", required=True, type=click.Path(), help="Input load CSV.")
@click.option("--family", default=FEEDFORWARD, show_default=True,
              type=click.Choice(FAMILIES))
@click.option("--network", default=4, show_default=True, help="Catalog structure number (1..5).")
@click.option("--inputs", default=7, show_default=True, help="Lag window width.")
@click.option("--delay", default=1, show_default=True, help="Hours between newest input and target.")
@_train_options
@click.option("--train-days", default=40, show_default=True)
@click.option("--out-model", required=True, type=click.Path())
@click.option("--curve-out", default=None, type=click.Path(),
              help="Optional epoch,mse CSV of the winning restart.")
@friendly_errors
def train(data, family, network, inputs, delay, epochs, lr, restarts, seed,
          error_goal, truncation, train_days, out_model, curve_out):
    """Train one network with the multi-restart protocol."""
    series = load_csv(data)
    training_series = first_hours(series, train_days * HOURS_PER_DAY)
    spec = WindowSpec(delay, inputs)
    windows = build_windows(training_series, spec)
    cfg = TrainConfig(
        epochs=epochs, error_goal=error_goal, learning_rate=lr,
        restarts=restarts, seed=seed, bptt_truncation=truncation,
    )
    result = train_multi_restart(family, catalog_structure(network), windows, cfg)
    provenance = {
        "seed": seed,
        "epochs": epochs,
        "learning_rate": lr,
        "restarts": restarts,
        "error_goal": error_goal,
        "bptt_truncation": truncation,
        "train_days": train_days,
        "train_samples": len(training_series),
        "stopped_at_epoch": result.stopped_at_epoch,
        "goal_reached": result.goal_reached,
        "final_train_mse": result.final_error,
        "restart_errors": [float(e) for e in result.restart_errors],
        "continued_epochs": 0,
    }
    save_model(ModelBundle(result.best, windows.norm, delay, provenance), out_model)
    if curve_out is not None:
        atomic_write_text(curve_out, _curve_csv(result.error_curve))
    click.echo(
        f"trained {family} network {network} (inputs={inputs}, delay={delay}): "
        f"final mse {result.final_error!r}, "
        f"goal {'reached' if result.goal_reached else 'not reached'} "
        f"at epoch {result.stopped_at_epoch}"
    )


@main.command(name="continue")
@click.option("--model", required=True, type=click.Path(), help="Existing model file.")
@click.option("--data", required=True, type=click.Path(), help="Same training CSV.")
@click.option("--extra-epochs", required=True, type=int)
@click.option("--lr", default=None, type=float,
              help="Override the learning rate recorded in the model.")
@click.option("--out-model", default=None, type=click.Path(),
              help="Destination (defaults to overwriting --model).")
@friendly_errors
def continue_training(model, data, extra_epochs, lr, out_model):
    """Train an existing model further on its original data."""
    bundle = load_model(model)
    provenance = dict(bundle.provenance)
    train_samples = provenance.get("train_samples")
    if train_samples is None:
        raise ValueError("model provenance lacks train_samples; cannot continue")
    series = load_csv(data)
    training_series = first_hours(series, int(train_samples))
    spec = WindowSpec(bundle.delay, bundle.network.input_count)
    windows = build_windows(training_series, spec, norm=bundle.norm)
    cfg = TrainConfig(
        epochs=extra_epochs,
        error_goal=provenance.get("error_goal", 1e-10),
        learning_rate=lr if lr is not None else provenance.get("learning_rate", 0.01),
        restarts=1,
        seed=provenance.get("seed", 0),
        bptt_truncation=provenance.get("bptt_truncation", 1),
    )
    if bundle.network.family == ELMAN:
        result = backprop_elman(bundle.network, windows, cfg)
    else:
        result = backprop_feedforward(bundle.network, windows, cfg)
    provenance["continued_epochs"] = provenance.get("continued_epochs", 0) + extra_epochs
    provenance["stopped_at_epoch"] = result.stopped_at_epoch
    provenance["goal_reached"] = result.goal_reached
    provenance["final_train_mse"] = result.final_error
    destination = out_model if out_model is not None else model
    save_model(ModelBundle(result.best, bundle.norm, bundle.delay, provenance), destination)
    click.echo(
        f"continued for {result.stopped_at_epoch} epochs: "
        f"final mse {result.final_error!r}"
    )


@main.command()
@click.option("--model", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path(),
              help="CSV whose leading hours are the forecast history.")
@click.option("--horizon-hours", default=48, show_default=True)
@click.option("--history-hours", default=None, type=int,
              help="History length (defaults to the model's training span).")
@click.option("--out", required=True, type=click.Path(), help="Overlay CSV path.")
@friendly_errors
def forecast(model, data, horizon_hours, history_hours, out):
    """Forecast past the training span and emit an overlay CSV."""
    bundle = load_model(model)
    series = load_csv(data)
    if history_hours is None:
        history_hours = bundle.provenance.get("train_samples")
        if history_hours is None:
            raise ValueError(
                "model provenance lacks train_samples; pass --history-hours"
            )
    history_hours = int(history_hours)
    history = first_hours(series, history_hours)
    actual = None
    if len(series) >= history_hours + horizon_hours:
        actual = series.values[history_hours : history_hours + horizon_hours]
    spec = WindowSpec(bundle.delay, bundle.network.input_count)
    result = forecast_recursive(
        bundle.network, bundle.norm, history, spec, horizon_hours, actual=actual
    )
    atomic_write_text(out, forecast_to_csv(result))
    if result.metrics is not None:
        click.echo(
            f"forecast {horizon_hours}h: mape {result.metrics.mape!r}% "
            f"mse {result.metrics.mse!r} max_abs {result.metrics.max_abs_error!r} kW"
        )
    else:
        click.echo(f"forecast {horizon_hours}h written (no actuals available)")


def _parse_filter(text: str | None) -> dict | None:
    if not text:
        return None
    subset: dict = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"filter term {part!r} is not key=value")
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "family":
            subset.setdefault(key, []).append(value)
        elif key in ("network", "delay", "inputs"):
            subset.setdefault(key, []).append(int(value))
        else:
            raise ValueError(f"unknown filter key: {key!r}")
    return subset


@main.command()
@click.option("--data", required=True, type=click.Path())
@click.option("--families", default="feedforward,elman", show_default=True,
              help="Comma-separated families to run.")
@click.option("--filter", "filter_text", default=None,
              help="Cell filter, e.g. 'family=feedforward,network=4,delay=1,inputs=7'.")
@click.option("--epochs", default=300, show_default=True)
@click.option("--lr", default=0.01, show_default=True)
@click.option("--restarts", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--error-goal", default=1e-10, show_default=True)
@click.option("--train-days", default=40, show_default=True)
@click.option("--test-days", default=21, show_default=True)
@click.option("--horizon-hours", default=48, show_default=True)
@click.option("--report-out", required=True, type=click.Path())
@click.option("--timing", is_flag=True,
              help="Include wall-clock cell timings (breaks rerun byte-identity).")
@friendly_errors
def grid(data, families, filter_text, epochs, lr, restarts, seed, error_goal,
         train_days, test_days, horizon_hours, report_out, timing):
    """Run the structure x window grid and write a JSON report."""
    series = load_csv(data)
    family_list = tuple(f.strip() for f in families.split(",") if f.strip())
    cfg = TrainConfig(epochs=epochs, error_goal=error_goal, learning_rate=lr,
                      restarts=restarts, seed=seed)
    report = run_grid(
        series, cfg,
        families=family_list,
        subset_filter=_parse_filter(filter_text),
        train_days=train_days,
        test_days=test_days,
        horizon_hours=horizon_hours,
    )
    verify_report(report)
    atomic_write_text(report_out, report_to_json(report, include_timing=timing))
    for family, best in ((FEEDFORWARD, report.best_feedforward), (ELMAN, report.best_elman)):
        if best is not None:
            click.echo(
                f"best {family}: network={best.network_number} delay={best.delay} "
                f"inputs={best.input_count} test_mape={best.test_mape!r}%"
            )
    click.echo(f"report written to {report_out} ({len(report.cells)} cells)")


@main.command()
@click.option("--kind", required=True,
              type=click.Choice(["inputs", "structures", "delays", "elman-complexity"]))
@click.option("--data", required=True, type=click.Path())
@click.option("--family", default=FEEDFORWARD, show_default=True,
              type=click.Choice(FAMILIES))
@click.option("--network", default=4, show_default=True)
@click.option("--inputs", default=7, show_default=True)
@click.option("--delay", default=1, show_default=True)
@_train_options
@click.option("--train-days", default=40, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@friendly_errors
def sweep(kind, data, family, network, inputs, delay, epochs, lr, restarts,
          seed, error_goal, truncation, train_days, out_dir):
    """Run one sweep and write per-configuration epoch,mse curve files."""
    series = load_csv(data)
    training_series = first_hours(series, train_days * HOURS_PER_DAY)
    cfg = TrainConfig(epochs=epochs, error_goal=error_goal, learning_rate=lr,
                      restarts=restarts, seed=seed, bptt_truncation=truncation)
    if kind == "inputs":
        curves = sweep_inputs(training_series, family, network, delay, cfg)
    elif kind == "structures":
        curves = sweep_structures(training_series, family, inputs, delay, cfg)
    elif kind == "delays":
        curves = sweep_delays(training_series, family, network, inputs, cfg)
    else:
        curves = sweep_complexity_elman(training_series, cfg, delay=delay)
    os.makedirs(out_dir, exist_ok=True)
    summary = {
        "kind": kind,
        "train_days": train_days,
        "seed": seed,
        "epochs": epochs,
        "curves": [
            {
                "label": curve.label,
                "family": curve.family,
                "network_number": curve.network_number,
                "delay": curve.delay,
                "input_count": curve.input_count,
                "file": curve.filename,
                "final_error": curve.final_error,
                "goal_epoch": curve.goal_epoch,
            }
            for curve in curves
        ],
    }
    for curve in curves:
        atomic_write_text(os.path.join(out_dir, curve.filename), curve_to_csv(curve))
    atomic_write_text(
        os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2) + "\n"
    )
    for curve in curves:
        click.echo(f"{curve.label}: final mse {curve.final_error!r}")
    click.echo(f"{len(curves)} curves written to {out_dir}")


if __name__ == "__main__":
    main()
