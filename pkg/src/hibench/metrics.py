"""Error metrics, rolling evaluation and the published reference scores."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from hibench.data import TimeSeries
from hibench.windowing import ForecastTask, chunk_ranges, window_block, window_count

MODES = ("univariate", "multivariate")
# bound on window rows x columns materialized per block
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class MetricReport:
    dataset: str
    mode: str
    predictor: str
    horizon: int
    lookback: int
    offset: int
    stride: int
    window_count: int
    mse: float
    mae: float
    reference: str | None = None  # dataset key into the reference scores

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "MetricReport":
        return cls(**d)


def _per_window(
    predictions: Sequence[np.ndarray], truths: Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    if len(predictions) == 0:
        raise ValueError("no windows to score")
    if len(predictions) != len(truths):
        raise ValueError(
            f"{len(predictions)} predictions for {len(truths)} target windows"
        )
    sq = np.empty(len(predictions))
    ab = np.empty(len(predictions))
    for k, (p, t) in enumerate(zip(predictions, truths)):
        p = np.asarray(p, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        if p.shape != t.shape:
            raise ValueError(f"window {k}: prediction shape {p.shape} != target shape {t.shape}")
        err = p - t
        sq[k] = np.mean(err * err)
        ab[k] = np.mean(np.abs(err))
    return sq, ab


def mse(predictions: Sequence[np.ndarray], truths: Sequence[np.ndarray]) -> float:
    """Mean over windows of each window's mean squared error."""
    return float(np.mean(_per_window(predictions, truths)[0]))


def mae(predictions: Sequence[np.ndarray], truths: Sequence[np.ndarray]) -> float:
    """Mean over windows of each window's mean absolute error."""
    return float(np.mean(_per_window(predictions, truths)[1]))


def window_errors(pred: np.ndarray, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-window (MSE, MAE) for stacked arrays of shape (n, L_y, d_y)."""
    if pred.shape != truth.shape:
        raise ValueError(f"prediction shape {pred.shape} != target shape {truth.shape}")
    err = (pred - truth).reshape(pred.shape[0], -1)
    return np.mean(err * err, axis=1), np.mean(np.abs(err), axis=1)


def evaluate(
    ts: TimeSeries,
    task: ForecastTask,
    predictor,
    jobs: int = 1,
    chunk: int | None = None,
) -> tuple[float, float, int]:
    """Score ``predictor`` on every window of ``ts``; return (mse, mae, count).

    Per-window errors are computed independently and reduced in window order,
    so the result does not depend on ``chunk`` or ``jobs``.
    """
    n = window_count(ts.length, task)
    if chunk is None:
        chunk = max(1, _CHUNK_ELEMENTS // (task.span * ts.width))

    def score(bounds):
        inputs, targets = window_block(ts, task, *bounds)
        return window_errors(predictor(inputs, task.horizon), targets)

    ranges = chunk_ranges(n, chunk)
    if jobs > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(score, ranges))
    else:
        parts = [score(r) for r in ranges]
    sq = np.concatenate([p[0] for p in parts])
    ab = np.concatenate([p[1] for p in parts])
    return float(np.mean(sq)), float(np.mean(ab)), n


def relative_improvement(best_sota: float, hi: float) -> float:
    """``(best_sota - hi) / best_sota``; positive when ``hi`` is the lower error."""
    if not best_sota > 0:
        raise ValueError(f"reference score must be positive, got {best_sota}")
    return (best_sota - hi) / best_sota


@dataclass(frozen=True)
class ReferenceEntry:
    model: str
    value: float
    suspect: bool = False


class ReferenceScores:
    """Published scores keyed by (dataset, mode, horizon, metric).

    Entries keep the row order of the source tables.
    """

    def __init__(self, records: Iterable[Mapping], published_hi: Iterable[Mapping] = (),
                 version: str = ""):
        self.version = version
        self._table: dict[tuple, list[ReferenceEntry]] = {}
        self.models: dict[str, list[str]] = {m: [] for m in MODES}
        for r in records:
            key = (r["dataset"], r["mode"], int(r["horizon"]), r["metric"].upper())
            value = float(r["value"])
            if not value > 0:
                raise ValueError(f"reference value must be positive: {r}")
            self._table.setdefault(key, []).append(
                ReferenceEntry(r["model"], value, bool(r.get("suspect", False)))
            )
            if r["model"] not in self.models[r["mode"]]:
                self.models[r["mode"]].append(r["model"])
        self.published_hi = {
            (r["dataset"], r["mode"], int(r["horizon"]), r["metric"].upper()): float(r["value"])
            for r in published_hi
        }

    @classmethod
    def bundled(cls) -> "ReferenceScores":
        text = resources.files("hibench").joinpath("reference_scores.json").read_text()
        doc = json.loads(text)
        return cls(doc["records"], doc.get("published_hi", ()), doc.get("version", ""))

    def __contains__(self, key) -> bool:
        return key in self._table

    def entries(self, dataset: str, mode: str, horizon: int, metric: str) -> list[ReferenceEntry]:
        key = (dataset, mode, int(horizon), metric.upper())
        try:
            return list(self._table[key])
        except KeyError:
            raise KeyError(f"no reference scores for {key}") from None

    def datasets(self, mode: str) -> list[str]:
        seen = []
        for ds, m, _, _ in self._table:
            if m == mode and ds not in seen:
                seen.append(ds)
        return seen

    def horizons(self, dataset: str, mode: str) -> list[int]:
        return sorted({h for ds, m, h, _ in self._table if ds == dataset and m == mode})


def best_reference(
    refs: ReferenceScores,
    dataset: str,
    mode: str,
    horizon: int,
    metric: str,
    include_suspect: bool = False,
) -> tuple[str, float]:
    """Lowest published error for a cell; ties go to the earlier table row.

    Cells flagged as suspect transcriptions are skipped unless requested.
    """
    entries = refs.entries(dataset, mode, horizon, metric)
    if not include_suspect:
        entries = [e for e in entries if not e.suspect] or entries
    best = entries[0]
    for e in entries[1:]:
        if e.value < best.value:
            best = e
    return best.model, best.value
