"""Hourly load series: ingestion, synthesis, windowing, normalization, splits.

A window specification pairs a delay d (hours between the newest input and
the target) with an input count m; the inputs for target index k are the
series values at lags d+m-1 down to d, oldest first:

    inputs = [u(k-(d+m-1)), ..., u(k-d)]   ->   target = u(k)

Enumerating delays 1..4 against input counts 2..8 yields the 28 canonical
dataset layouts; the complexity sweep additionally uses wider windows (up
to 12 inputs), so validation accepts that extended range.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from .errors import CsvParseError, InsufficientDataError, SeriesValidationError
from .fileio import atomic_write_text

HOURS_PER_DAY = 24
HOURS_PER_WEEK = 168
HOUR = timedelta(hours=1)

DELAYS = (1, 2, 3, 4)
CATALOG_INPUT_COUNTS = (2, 3, 4, 5, 6, 7, 8)
MAX_INPUT_COUNT = 12

CSV_HEADER = "timestamp,load_kw"


@dataclass(frozen=True)
class LoadSeries:
    """Hourly load measurements in kW starting at a whole hour."""

    start: datetime
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise SeriesValidationError("load series must be a non-empty 1-D vector")
        if not np.all(np.isfinite(values)):
            raise SeriesValidationError("load series contains non-finite values")
        if np.any(values < 0):
            raise SeriesValidationError("load values must be non-negative")
        if self.start.minute or self.start.second or self.start.microsecond:
            raise SeriesValidationError("series must start at a whole hour")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    def timestamp_at(self, index: int) -> datetime:
        return self.start + index * HOUR

    @property
    def end(self) -> datetime:
        """Timestamp one hour past the last sample."""
        return self.timestamp_at(len(self))

    def slice_hours(self, start_index: int, length: int) -> "LoadSeries":
        if start_index < 0 or length < 1 or start_index + length > len(self):
            raise InsufficientDataError(
                f"cannot slice {length} hours at offset {start_index} "
                f"from a {len(self)}-hour series"
            )
        return LoadSeries(
            start=self.timestamp_at(start_index),
            values=self.values[start_index : start_index + length],
        )


def first_hours(series: LoadSeries, hours: int) -> LoadSeries:
    """The leading ``hours`` samples of a series."""
    return series.slice_hours(0, hours)


@dataclass(frozen=True)
class NormParams:
    """Linear map taking [min_kw, max_kw] onto [-1, 1]."""

    min_kw: float
    max_kw: float

    def __post_init__(self):
        if not (np.isfinite(self.min_kw) and np.isfinite(self.max_kw)):
            raise ValueError("normalization bounds must be finite")
        if self.max_kw <= self.min_kw:
            raise ValueError("normalization requires max_kw > min_kw")

    @classmethod
    def from_values(cls, values) -> "NormParams":
        values = np.asarray(values, dtype=float)
        return cls(min_kw=float(values.min()), max_kw=float(values.max()))


def normalize(x, norm: NormParams):
    """Map kW values into [-1, 1] using the given bounds."""
    return 2.0 * (np.asarray(x, dtype=float) - norm.min_kw) / (norm.max_kw - norm.min_kw) - 1.0


def denormalize(x, norm: NormParams):
    """Inverse of :func:`normalize`."""
    return (np.asarray(x, dtype=float) + 1.0) * (norm.max_kw - norm.min_kw) / 2.0 + norm.min_kw


@dataclass(frozen=True)
class WindowSpec:
    """A (delay, input_count) pair defining one windowed dataset layout."""

    delay: int
    input_count: int

    def __post_init__(self):
        if self.delay not in DELAYS:
            raise ValueError(f"delay must be in 1..4, got {self.delay}")
        if not 2 <= self.input_count <= MAX_INPUT_COUNT:
            raise ValueError(
                f"input_count must be in 2..{MAX_INPUT_COUNT}, got {self.input_count}"
            )

    @property
    def span(self) -> int:
        """Oldest lag consumed: delay + input_count - 1."""
        return self.delay + self.input_count - 1

    @property
    def min_series_length(self) -> int:
        """Shortest series that yields at least one (window, target) row."""
        return self.span + 1


def enumerate_specs() -> list[WindowSpec]:
    """The 28 canonical layouts, delay-major then input count."""
    return [
        WindowSpec(delay, input_count)
        for delay in DELAYS
        for input_count in CATALOG_INPUT_COUNTS
    ]


def lag_matrix(values, spec: WindowSpec) -> tuple[np.ndarray, np.ndarray]:
    """Raw (inputs, targets) windows of a value vector, oldest lag first.

    Row i predicts target index k = spec.span + i from
    values[k-span : k-delay+1]; values are returned untouched (no scaling).
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    rows = n - spec.span
    if rows < 1:
        raise InsufficientDataError(
            f"series of length {n} is too short for delay={spec.delay}, "
            f"input_count={spec.input_count}; need at least {spec.min_series_length} samples"
        )
    inputs = np.empty((rows, spec.input_count))
    for j in range(spec.input_count):
        # column j holds lag span-j, i.e. values[j : j+rows]
        inputs[:, j] = values[j : j + rows]
    targets = values[spec.span :].copy()
    return inputs, targets


@dataclass(frozen=True)
class WindowedDataset:
    """Normalized (window, target) rows for one layout plus the scaling used."""

    spec: WindowSpec
    inputs: np.ndarray
    targets: np.ndarray
    norm: NormParams

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.spec.input_count:
            raise ValueError(
                f"inputs must have shape (n, {self.spec.input_count}), got {inputs.shape}"
            )
        if targets.shape != (inputs.shape[0],):
            raise ValueError("targets must match the number of input rows")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return int(self.targets.size)


def build_windows(
    series: LoadSeries,
    spec: WindowSpec,
    norm: NormParams | None = None,
) -> WindowedDataset:
    """Window a series per ``spec`` and scale the result into [-1, 1].

    When ``norm`` is omitted the bounds are computed from this series, which
    is only appropriate for training data; window a held-out series with the
    training bounds passed explicitly.
    """
    raw_inputs, raw_targets = lag_matrix(series.values, spec)
    if norm is None:
        norm = NormParams.from_values(series.values)
    return WindowedDataset(
        spec=spec,
        inputs=normalize(raw_inputs, norm),
        targets=normalize(raw_targets, norm),
        norm=norm,
    )


def split(series: LoadSeries, train_days: int, test_days: int) -> tuple[LoadSeries, LoadSeries]:
    """Chronological train/test split in whole days, test right after train."""
    if train_days < 1:
        raise ValueError("train_days must be at least 1")
    if test_days < 1:
        raise ValueError("test_days must be at least 1")
    train_hours = train_days * HOURS_PER_DAY
    test_hours = test_days * HOURS_PER_DAY
    if len(series) < train_hours + test_hours:
        raise InsufficientDataError(
            f"series has {len(series)} samples but "
            f"{train_days}+{test_days} days need {train_hours + test_hours}"
        )
    train = series.slice_hours(0, train_hours)
    test = series.slice_hours(train_hours, test_hours)
    return train, test


@dataclass(frozen=True)
class SynthParams:
    """Shape of the synthetic generator.

    The deterministic part is a night-time base plus a daytime activity bump
    (trough at 03:00, peak at 15:00, swing daily_amplitude_kw); over the
    weekend the bump is scaled by weekend_factor and the base sags by
    weekend_base_dip (idle industry), both following raised-cosine ramps
    through the Friday and Sunday nights so the week winds down and back up
    smoothly instead of stepping at midnight. The stochastic part
    is white measurement noise with sigma = noise_fraction * base_kw plus a
    mean-reverting demand level (weather-style swings, stationary sigma =
    level_noise_ratio times the white sigma, hourly autocorrelation
    level_reversion); zero noise_fraction therefore yields an exactly
    week-periodic series. The default start falls on a Thursday so the
    standard 40-day training split is followed by plain weekdays.
    """

    base_kw: float = 500.0
    daily_amplitude_kw: float = 250.0
    weekend_factor: float = 0.7
    weekend_base_dip: float = 0.1
    noise_fraction: float = 0.02
    level_noise_ratio: float = 2.0
    level_reversion: float = 0.98
    start: datetime = field(default_factory=lambda: datetime(2007, 1, 4))


def _slow_level(rng, n: int, sigma: float, rho: float) -> np.ndarray:
    """Mean-reverting AR(1) level wander with stationary sigma ``sigma``."""
    steps = rng.normal(0.0, sigma * np.sqrt(1.0 - rho * rho), n)
    start = rng.normal(0.0, sigma)
    level = np.empty(n)
    current = start
    for t in range(n):
        current = rho * current + steps[t]
        level[t] = current
    return level


def _weekendness(week_hour: np.ndarray) -> np.ndarray:
    """Smooth 0..1 weekend indicator over the hour-of-week (0 = Mon 00:00).

    1 from Saturday 06:00 through Sunday 18:00, with 12-hour raised-cosine
    ramps starting Friday 18:00 (up) and Sunday 18:00 (down).
    """
    ramp_up_start = 4 * HOURS_PER_DAY + 18   # Friday 18:00
    ramp_down_start = 6 * HOURS_PER_DAY + 18  # Sunday 18:00
    ramp = 12.0
    w = np.zeros_like(week_hour, dtype=float)
    rising = (week_hour >= ramp_up_start) & (week_hour < ramp_up_start + ramp)
    w[rising] = 0.5 * (1.0 - np.cos(np.pi * (week_hour[rising] - ramp_up_start) / ramp))
    plateau = (week_hour >= ramp_up_start + ramp) & (week_hour < ramp_down_start)
    w[plateau] = 1.0
    falling = (week_hour >= ramp_down_start) & (week_hour < ramp_down_start + ramp)
    w[falling] = 0.5 * (1.0 + np.cos(np.pi * (week_hour[falling] - ramp_down_start) / ramp))
    return w


def synthesize(days: int, seed: int, params: SynthParams | None = None) -> LoadSeries:
    """Generate ``days`` of plausible hourly load, deterministically per seed."""
    if days < 1:
        raise ValueError("days must be at least 1")
    params = params or SynthParams()
    n = days * HOURS_PER_DAY
    rng = np.random.default_rng(seed)
    hours = np.arange(n)
    hour_of_day = (params.start.hour + hours) % HOURS_PER_DAY
    week_hour = (params.start.weekday() * HOURS_PER_DAY + params.start.hour + hours) % HOURS_PER_WEEK
    activity = 0.5 * (1.0 + np.sin(2.0 * np.pi * (hour_of_day - 9.0) / HOURS_PER_DAY))
    weekendness = _weekendness(week_hour)
    factor = 1.0 - (1.0 - params.weekend_factor) * weekendness
    values = params.base_kw + params.daily_amplitude_kw * activity * factor
    white_sigma = params.noise_fraction * params.base_kw
    if white_sigma > 0:
        values = values + rng.normal(0.0, white_sigma, n)
        values = values + _slow_level(
            rng, n, params.level_noise_ratio * white_sigma, params.level_reversion
        )
    if np.any(values <= 0):
        raise ValueError(
            "generator parameters produced non-positive load; "
            "reduce amplitude or noise relative to base_kw"
        )
    return LoadSeries(start=params.start, values=values)


def series_to_csv(series: LoadSeries) -> str:
    """Render a series in the canonical CSV format."""
    lines = [CSV_HEADER]
    for i, value in enumerate(series.values):
        lines.append(f"{series.timestamp_at(i).isoformat()},{value!r}")
    return "\n".join(lines) + "\n"


def save_csv(series: LoadSeries, path: str) -> None:
    atomic_write_text(path, series_to_csv(series))


def load_csv(path: str) -> LoadSeries:
    """Parse the canonical CSV format, validating hourly continuity."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return _parse_csv(handle)


def _parse_csv(handle) -> LoadSeries:
    reader = csv.reader(handle)
    timestamps: list[datetime] = []
    values: list[float] = []
    for line_number, row in enumerate(reader, start=1):
        if line_number == 1:
            if [cell.strip() for cell in row] != CSV_HEADER.split(","):
                raise CsvParseError(line_number, f"expected header {CSV_HEADER!r}")
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise CsvParseError(line_number, f"expected 2 fields, got {len(row)}")
        try:
            ts = datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise CsvParseError(line_number, f"bad timestamp {row[0]!r}") from None
        if ts.minute or ts.second or ts.microsecond:
            raise CsvParseError(line_number, f"timestamp {row[0]!r} is not a whole hour")
        try:
            value = float(row[1])
        except ValueError:
            raise CsvParseError(line_number, f"bad load value {row[1]!r}") from None
        timestamps.append(ts)
        values.append(value)
    if not timestamps:
        raise SeriesValidationError("CSV contains no data rows")
    start = timestamps[0]
    gaps: list[str] = []
    for i in range(1, len(timestamps)):
        step = timestamps[i] - timestamps[i - 1]
        if step <= timedelta(0):
            raise SeriesValidationError(
                f"timestamps not strictly increasing at {timestamps[i].isoformat()}"
            )
        if step != HOUR:
            missing = timestamps[i - 1] + HOUR
            while missing < timestamps[i]:
                gaps.append(missing.isoformat())
                missing += HOUR
    if gaps:
        shown = ", ".join(gaps[:5])
        more = f" (+{len(gaps) - 5} more)" if len(gaps) > 5 else ""
        raise SeriesValidationError(f"hourly gaps, missing: {shown}{more}")
    return LoadSeries(start=start, values=np.array(values))


def parse_csv_text(text: str) -> LoadSeries:
    """Parse CSV content already held in memory (tests, round trips)."""
    return _parse_csv(io.StringIO(text))
