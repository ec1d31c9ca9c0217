"""Historical-inertia baseline and benchmark harness for long-horizon forecasting."""

from hibench.analysis import autocorrelation, detect_period, select_predictor
from hibench.baselines import hi_forecast, hybrid_forecast, mean_forecast, seasonal_naive_forecast
from hibench.data import (
    SplitSpec,
    TimeSeries,
    apply_scaler,
    fit_scaler,
    invert_scaler,
    load_table,
    select_targets,
    split,
)
from hibench.metrics import ReferenceScores, best_reference, mae, mse, relative_improvement
from hibench.windowing import ForecastTask, Window, enumerate_windows, slice_window

__version__ = "0.1.0"
