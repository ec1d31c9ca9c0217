"""Historical inertia and the simple reference predictors.

Every predictor maps an input block of shape (..., L_x, d) to a forecast of
shape (..., L_y, d_y), so the same function serves a single window or a
stacked batch of windows.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def _columns(cols) -> slice | list[int]:
    return slice(None) if cols is None else cols


def _check_input(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim < 2:
        raise ValueError(f"input must be at least 2-D (L_x, d), got shape {x.shape}")
    return x


def hi_forecast(x: np.ndarray, horizon: int, columns=None) -> np.ndarray:
    """Historical inertia: the last ``horizon`` input rows, copied verbatim."""
    x = _check_input(x)
    lookback = x.shape[-2]
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if horizon > lookback:
        raise ValueError(
            f"historical inertia needs lookback >= horizon; got lookback {lookback} "
            f"< horizon {horizon}"
        )
    return x[..., lookback - horizon :, :][..., _columns(columns)].copy()


def seasonal_naive_forecast(
    x: np.ndarray, period: int, horizon: int, columns=None
) -> np.ndarray:
    """Repeat the last full cycle of length ``period``."""
    x = _check_input(x)
    lookback = x.shape[-2]
    if period < 1 or period > lookback:
        raise ValueError(f"period {period} must lie in [1, lookback={lookback}]")
    rows = lookback - period + np.arange(horizon) % period
    return x[..., rows, :][..., _columns(columns)]


def mean_forecast(x: np.ndarray, horizon: int, columns=None) -> np.ndarray:
    x = _check_input(x)
    mean = x[..., _columns(columns)].mean(axis=-2, keepdims=True)
    shape = mean.shape[:-2] + (horizon, mean.shape[-1])
    return np.broadcast_to(mean, shape).copy()


def hybrid_forecast(a: np.ndarray, b: np.ndarray, alpha: float) -> np.ndarray:
    """Convex combination ``alpha * a + (1 - alpha) * b``.

    The endpoints return exact copies rather than evaluating the arithmetic,
    so ``alpha=1`` reproduces ``a`` bit for bit.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"hybrid weight must lie in [0, 1], got {alpha}")
    if alpha == 1.0:
        return a.copy()
    if alpha == 0.0:
        return b.copy()
    return alpha * a + (1.0 - alpha) * b


Predictor = Callable[[np.ndarray, int], np.ndarray]


def make_predictor(name: str, period: int | None = None, alpha: float | None = None,
                   base: str = "mean", columns=None) -> Predictor:
    """Build a ``(inputs, horizon) -> forecast`` callable from a registered name."""
    if name == "hi":
        return lambda x, h: hi_forecast(x, h, columns)
    if name == "mean":
        return lambda x, h: mean_forecast(x, h, columns)
    if name == "seasonal_naive":
        if period is None:
            raise ValueError("seasonal_naive needs a period")
        return lambda x, h: seasonal_naive_forecast(x, period, h, columns)
    if name == "hybrid":
        if alpha is None:
            raise ValueError("hybrid needs a weight alpha")
        if base == "hybrid":
            raise ValueError("hybrid base must be a plain predictor")
        other = make_predictor(base, period=period, columns=columns)
        return lambda x, h: hybrid_forecast(hi_forecast(x, h, columns), other(x, h), alpha)
    raise KeyError(f"unknown predictor {name!r}; known: {sorted(PREDICTORS)}")


PREDICTORS: Sequence[str] = ("hi", "seasonal_naive", "mean", "hybrid")
