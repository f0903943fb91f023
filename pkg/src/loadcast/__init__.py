"""Short-term electric load forecasting with small neural networks.

Two network families (a three-layer feedforward perceptron and an Elman
recurrent network) are trained from scratch with backpropagation on
sliding-window datasets built from hourly load series, then used for
recursive multi-step forecasting. The experiments module reproduces the
structure/input/delay comparison grids; the CLI drives the whole pipeline.
"""

from .dataset import (
    LoadSeries,
    NormParams,
    SynthParams,
    WindowSpec,
    WindowedDataset,
    build_windows,
    denormalize,
    enumerate_specs,
    lag_matrix,
    load_csv,
    normalize,
    save_csv,
    split,
    synthesize,
)
from .errors import (
    CsvParseError,
    DivergenceError,
    InsufficientDataError,
    SeriesValidationError,
    TrainingFailedError,
)
from .estimators import ElmanRegressor, FeedforwardRegressor
from .experiments import (
    GridCell,
    GridReport,
    run_grid,
    sweep_complexity_elman,
    sweep_delays,
    sweep_inputs,
    sweep_structures,
)
from .forecasting import (
    ForecastResult,
    MetricSet,
    evaluate,
    forecast_recursive,
    persistence_baseline,
)
from .model_io import ModelBundle, load_model, save_model
from .networks import (
    ELMAN,
    FEEDFORWARD,
    NetworkState,
    StructureSpec,
    activate,
    catalog_structure,
    forward_elman,
    forward_feedforward,
    initialize,
)
from .training import (
    TrainConfig,
    TrainResult,
    backprop_elman,
    backprop_feedforward,
    gradient_check,
    mse,
    train_multi_restart,
)

__version__ = "0.1.0"

__all__ = [
    "LoadSeries", "NormParams", "SynthParams", "WindowSpec", "WindowedDataset",
    "build_windows", "denormalize", "enumerate_specs", "lag_matrix", "load_csv",
    "normalize", "save_csv", "split", "synthesize",
    "CsvParseError", "DivergenceError", "InsufficientDataError",
    "SeriesValidationError", "TrainingFailedError",
    "ElmanRegressor", "FeedforwardRegressor",
    "GridCell", "GridReport", "run_grid", "sweep_complexity_elman",
    "sweep_delays", "sweep_inputs", "sweep_structures",
    "ForecastResult", "MetricSet", "evaluate", "forecast_recursive",
    "persistence_baseline",
    "ModelBundle", "load_model", "save_model",
    "ELMAN", "FEEDFORWARD", "NetworkState", "StructureSpec", "activate",
    "catalog_structure", "forward_elman", "forward_feedforward", "initialize",
    "TrainConfig", "TrainResult", "backprop_elman", "backprop_feedforward",
    "gradient_check", "mse", "train_multi_restart",
]
