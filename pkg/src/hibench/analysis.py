"""Periodicity analysis and validation-driven predictor selection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from hibench.baselines import make_predictor
from hibench.data import TimeSeries
from hibench.errors import ConfigError, DataError
from hibench.metrics import evaluate
from hibench.windowing import ForecastTask, window_count

DEFAULT_ALPHAS = tuple(i / 10 for i in range(11))
DEFAULT_THRESHOLD = 0.3


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation for lags ``0..max_lag`` (index = lag).

    Uses the biased estimator: lag-k cross products summed over the ``n - k``
    available pairs, divided by the lag-0 sum, so ``acf[0] == 1``.
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if n < max_lag + 2:
        raise ValueError(f"series of length {n} is too short for max_lag {max_lag}")
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if not denom > 0:
        raise DataError("autocorrelation of a constant series is undefined")
    size = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, size)
    acov = np.fft.irfft(spec * np.conj(spec), size)[: max_lag + 1]
    return acov / denom


@dataclass(frozen=True)
class PeriodEstimate:
    period: int | None
    strength: float

    def to_dict(self) -> dict:
        return {"period": self.period, "strength": self.strength}


def detect_period(
    series,
    min_lag: int = 2,
    max_lag: int | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> PeriodEstimate:
    """Strongest local maximum of the ACF within ``[min_lag, max_lag]``.

    Returns ``period=None`` when no local maximum reaches ``threshold``; the
    reported strength is then the best local-maximum value (0.0 if none).
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if max_lag is None:
        max_lag = max(min_lag, min(n // 2, n - 2))
    if min_lag < 1 or max_lag < min_lag:
        raise ConfigError(f"invalid lag range [{min_lag}, {max_lag}]")
    if max_lag > n - 2:
        raise ConfigError(f"max_lag {max_lag} too large for a series of length {n}")
    # one extra lag so the right edge of the range can be tested as a peak
    top = min(max_lag + 1, n - 2)
    acf = autocorrelation(x, top)
    best_lag, best = None, None
    for k in range(min_lag, max_lag + 1):
        left_ok = acf[k] > acf[k - 1]
        right_ok = k + 1 > top or acf[k] >= acf[k + 1]
        if left_ok and right_ok and (best is None or acf[k] > best):
            best_lag, best = k, float(acf[k])
    if best is None or best < threshold:
        return PeriodEstimate(None, 0.0 if best is None else best)
    return PeriodEstimate(best_lag, best)


@dataclass(frozen=True)
class Candidate:
    name: str
    base: str | None = None
    period: int | None = None
    alpha: float | None = None

    @property
    def label(self) -> str:
        if self.name == "seasonal_naive":
            return f"seasonal_naive[p={self.period}]"
        if self.name == "hybrid":
            base = self.base if self.base != "seasonal_naive" else f"seasonal_naive[p={self.period}]"
            return f"hybrid[hi+{base},alpha={self.alpha:g}]"
        return self.name

    def params(self) -> dict:
        out = {"predictor": self.name}
        if self.base is not None:
            out["base"] = self.base
        if self.period is not None:
            out["period"] = self.period
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out


@dataclass
class SelectionResult:
    chosen: Candidate
    scores: dict[str, tuple[float, float]]
    period: PeriodEstimate
    rationale: str
    objective: str = "mse"
    window_count: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chosen": {"label": self.chosen.label, **self.chosen.params()},
            "objective": self.objective,
            "detected_period": self.period.to_dict(),
            "validation_windows": self.window_count,
            "scores": {k: {"mse": v[0], "mae": v[1]} for k, v in self.scores.items()},
            "rationale": self.rationale,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def build_candidates(
    names, lookback: int, period: int | None, alphas=DEFAULT_ALPHAS
) -> tuple[list[Candidate], list[str]]:
    """Expand predictor names into concrete candidates in tie-break order.

    Order is HI, then plain base predictors, then hybrids sorted by weight.
    """
    notes = []
    plain, bases = [], []
    if "hi" in names:
        plain.append(Candidate("hi"))
    for name in names:
        if name in ("hi", "hybrid"):
            continue
        if name == "seasonal_naive":
            if period is None:
                notes.append("seasonal_naive skipped: no period detected")
                continue
            if period > lookback:
                notes.append(f"seasonal_naive skipped: period {period} exceeds lookback {lookback}")
                continue
            cand = Candidate("seasonal_naive", period=period)
        elif name == "mean":
            cand = Candidate("mean")
        else:
            raise ConfigError(f"unknown candidate predictor {name!r}")
        plain.append(cand)
        bases.append(cand)
    hybrids = []
    if "hybrid" in names:
        if not bases:
            notes.append("hybrid skipped: no base predictor to combine with")
        for alpha in sorted(set(float(a) for a in alphas)):
            if not 0.0 <= alpha <= 1.0:
                raise ConfigError(f"hybrid weight {alpha} outside [0, 1]")
            for b in bases:
                hybrids.append(Candidate("hybrid", base=b.name, period=b.period, alpha=alpha))
    if not plain and not hybrids:
        raise ConfigError("no usable candidate predictors")
    return plain + hybrids, notes


def _predictor(cand: Candidate, columns):
    return make_predictor(
        cand.name, period=cand.period, alpha=cand.alpha, base=cand.base or "mean",
        columns=columns,
    )


def select_predictor(
    train: TimeSeries,
    val: TimeSeries,
    task: ForecastTask,
    candidates=("hi", "mean", "seasonal_naive", "hybrid"),
    alphas=DEFAULT_ALPHAS,
    min_lag: int = 2,
    max_lag: int | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    objective: str = "mse",
    period_column: str | None = None,
    jobs: int = 1,
) -> SelectionResult:
    """Pick the candidate with the lowest validation error.

    The period is estimated on the training segment only; ties keep the
    earlier candidate, so HI wins over anything that merely matches it.
    """
    if objective not in ("mse", "mae"):
        raise ConfigError(f"objective must be 'mse' or 'mae', got {objective!r}")
    if val.length < task.span:
        raise DataError(
            f"validation segment of {val.length} rows admits no window "
            f"(needs {task.span})"
        )
    column = period_column or task.target or train.column_names[-1]
    series = train.values[:, train.column_names.index(column)]
    if max_lag is not None:
        max_lag = min(max_lag, train.length - 2)
    period = detect_period(series, min_lag, max_lag, threshold)

    cands, notes = build_candidates(candidates, task.lookback, period.period, alphas)
    cols = None if task.target is None else [val.column_names.index(task.target)]
    scores: dict[str, tuple[float, float]] = {}
    chosen, chosen_score = None, None
    for cand in cands:
        mse_v, mae_v, _ = evaluate(val, task, _predictor(cand, cols), jobs=jobs)
        scores[cand.label] = (mse_v, mae_v)
        value = mse_v if objective == "mse" else mae_v
        if chosen is None or value < chosen_score:
            chosen, chosen_score = cand, value

    if period.period is None:
        phase = f"no period detected (best acf {period.strength:.3f} < {threshold:g})"
    else:
        cycles = task.horizon / period.period
        covers = "covers" if task.horizon >= period.period else "does not cover"
        phase = (
            f"detected period {period.period} (acf {period.strength:.3f}); "
            f"horizon {task.horizon} {covers} it ({cycles:.2f} cycles)"
        )
    rationale = "; ".join(
        [phase]
        + notes
        + ["interior hybrid weights serve as the intermediate variants between HI and each base",
           f"chose {chosen.label}: lowest validation {objective} "
           f"({chosen_score:.6g}) over {len(cands)} candidates"]
    )
    return SelectionResult(
        chosen, scores, period, rationale, objective, window_count(val.length, task), notes
    )
