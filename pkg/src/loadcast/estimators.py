"""scikit-learn style regressors wrapping the training pipeline.

``fit(X, y)`` takes lag windows as rows (build them with
:func:`loadcast.dataset.build_windows` / :func:`lag_matrix` or any other
way); scaling into the tansig-friendly [-1, 1] range happens internally
from the training data and is inverted on predict. Both estimators support
``get_params``/``set_params``/``clone`` and compose with sklearn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dataset import (
    LoadSeries,
    NormParams,
    WindowSpec,
    WindowedDataset,
    denormalize,
    normalize,
)
from .forecasting import ForecastResult, forecast_recursive
from .networks import (
    ELMAN,
    FEEDFORWARD,
    catalog_structure,
    forward_elman,
    forward_feedforward_batch,
)
from .training import TrainConfig, train_multi_restart


class _NetworkRegressor(BaseEstimator, RegressorMixin):
    """Shared fit/predict machinery; subclasses pin the network family."""

    _family = ""

    def __init__(
        self,
        network_number: int = 4,
        delay: int = 1,
        epochs: int = 2000,
        error_goal: float = 1e-10,
        learning_rate: float = 0.01,
        restarts: int = 10,
        seed: int = 0,
        bptt_truncation: int = 1,
    ):
        self.network_number = network_number
        self.delay = delay
        self.epochs = epochs
        self.error_goal = error_goal
        self.learning_rate = learning_rate
        self.restarts = restarts
        self.seed = seed
        self.bptt_truncation = bptt_truncation

    def _config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            error_goal=self.error_goal,
            learning_rate=self.learning_rate,
            restarts=self.restarts,
            seed=self.seed,
            bptt_truncation=self.bptt_truncation,
        )

    def fit(self, X, y):
        """Train on lag windows X (one row per sample) and targets y (kW)."""
        X, y = check_X_y(X, y, y_numeric=True)
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.n_features_in_ = X.shape[1]
        norm = NormParams(
            min_kw=float(min(X.min(), y.min())),
            max_kw=float(max(X.max(), y.max())),
        )
        windows = WindowedDataset(
            spec=WindowSpec(self.delay, X.shape[1]),
            inputs=normalize(X, norm),
            targets=normalize(y, norm),
            norm=norm,
        )
        result = train_multi_restart(
            self._family, catalog_structure(self.network_number), windows, self._config()
        )
        self.network_ = result.best
        self.norm_ = norm
        self.train_result_ = result
        return self

    def predict(self, X):
        """Predict the target for each lag-window row, in kW.

        For the Elman family the rows are treated as a chronological
        sequence: the context starts at zero and is carried row to row,
        matching how training evaluates an epoch.
        """
        check_is_fitted(self, "network_")
        X = check_array(X)
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        Xn = normalize(X, self.norm_)
        if self._family == ELMAN:
            context = np.zeros(self.network_.structure.layer1_neurons)
            outputs = np.empty(X.shape[0])
            for i, row in enumerate(Xn):
                outputs[i], context = forward_elman(self.network_, row, context)
        else:
            outputs = forward_feedforward_batch(self.network_, Xn)
        return denormalize(outputs, self.norm_)

    def forecast(self, history: LoadSeries, horizon_hours: int, actual=None) -> ForecastResult:
        """Recursive multi-step forecast past the end of ``history``."""
        check_is_fitted(self, "network_")
        spec = WindowSpec(self.delay, self.n_features_in_)
        return forecast_recursive(
            self.network_, self.norm_, history, spec, horizon_hours, actual=actual
        )


class FeedforwardRegressor(_NetworkRegressor):
    """Three-layer tansig/tansig/purelin perceptron trained by backprop."""

    _family = FEEDFORWARD


class ElmanRegressor(_NetworkRegressor):
    """Elman recurrent network; rows are consumed as a chronological sequence."""

    _family = ELMAN
