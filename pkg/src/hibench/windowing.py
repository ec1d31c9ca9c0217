"""Forecasting tasks and rolling (input, target) window placement.

With ``offset == 1`` the target range starts on the row right after the
input range; every extra unit of offset inserts one skipped row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from hibench.data import TimeSeries
from hibench.errors import ConfigError, DataError


@dataclass(frozen=True)
class ForecastTask:
    lookback: int
    horizon: int
    offset: int = 1
    target: str | None = None  # column name for univariate mode, None = multivariate
    stride: int = 1

    def __post_init__(self):
        for name in ("lookback", "horizon", "offset", "stride"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")

    @property
    def span(self) -> int:
        """Rows covered by one window, from input start to target end."""
        return self.lookback + self.offset - 1 + self.horizon


@dataclass(frozen=True)
class Window:
    input_start: int
    lookback: int
    horizon: int
    offset: int = 1

    @property
    def input_stop(self) -> int:
        return self.input_start + self.lookback

    @property
    def target_start(self) -> int:
        return self.input_start + self.lookback + self.offset - 1

    @property
    def target_stop(self) -> int:
        return self.target_start + self.horizon


def window_count(segment_length: int, task: ForecastTask) -> int:
    if segment_length < task.span:
        raise DataError(
            f"segment of {segment_length} rows is too short; lookback {task.lookback}, "
            f"offset {task.offset} and horizon {task.horizon} need at least {task.span}"
        )
    return (segment_length - task.span) // task.stride + 1


def enumerate_windows(segment_length: int, task: ForecastTask) -> list[Window]:
    n = window_count(segment_length, task)
    return [
        Window(k * task.stride, task.lookback, task.horizon, task.offset)
        for k in range(n)
    ]


def _target_index(ts: TimeSeries, task: ForecastTask) -> slice | list[int]:
    if task.target is None:
        return slice(None)
    try:
        return [ts.column_names.index(task.target)]
    except ValueError:
        raise DataError(f"unknown target column {task.target!r}") from None


def slice_window(
    ts: TimeSeries, w: Window, task: ForecastTask
) -> tuple[np.ndarray, np.ndarray]:
    """Copy out the input rows (all columns) and target rows (target columns)."""
    if w.input_start < 0 or w.target_stop > ts.length:
        raise DataError(
            f"window [{w.input_start}, {w.target_stop}) exceeds series of {ts.length} rows"
        )
    cols = _target_index(ts, task)
    x = ts.values[w.input_start : w.input_stop].copy()
    y = ts.values[w.target_start : w.target_stop][:, cols].copy()
    return x, y


def window_block(
    ts: TimeSeries, task: ForecastTask, lo: int, hi: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stacked inputs (n, lookback, d) and targets (n, horizon, d_y) for windows lo..hi-1."""
    n = window_count(ts.length, task)
    if not 0 <= lo <= hi <= n:
        raise DataError(f"window range [{lo}, {hi}) outside [0, {n})")
    cols = _target_index(ts, task)
    # (T - span + 1, d, span) view, no copy
    view = sliding_window_view(ts.values, task.span, axis=0)
    block = view[np.arange(lo, hi) * task.stride].transpose(0, 2, 1)
    tgt0 = task.lookback + task.offset - 1
    inputs = np.ascontiguousarray(block[:, : task.lookback, :])
    targets = np.ascontiguousarray(block[:, tgt0:, cols])
    return inputs, targets


def chunk_ranges(n: int, chunk: int) -> list[tuple[int, int]]:
    chunk = max(1, chunk)
    return [(lo, min(n, lo + chunk)) for lo in range(0, n, chunk)]


def batched_windows(ts: TimeSeries, task: ForecastTask, chunk: int | None = None):
    """Yield ``(inputs, targets)`` blocks of at most ``chunk`` windows, in order."""
    n = window_count(ts.length, task)
    for lo, hi in chunk_ranges(n, n if chunk is None else chunk):
        yield window_block(ts, task, lo, hi)
