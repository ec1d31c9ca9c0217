"""Ingestion, chronological splitting and train-fitted standardization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from hibench.errors import DataError


@dataclass(frozen=True)
class TimeSeries:
    """A T x d matrix of observations in chronological row order."""

    values: np.ndarray
    column_names: tuple[str, ...]
    sample_rate: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1:
            raise DataError("empty series")
        if values.shape[1] < 1:
            raise DataError("series has no columns")
        names = tuple(self.column_names)
        if len(names) != values.shape[1]:
            raise DataError(
                f"{len(names)} column names for {values.shape[1]} columns"
            )
        if any(not n for n in names):
            raise DataError("column names must be non-empty")
        if len(set(names)) != len(names):
            raise DataError(f"duplicate column names in {names}")
        if not np.isfinite(values).all():
            raise DataError("series contains NaN or infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def rows(self, start: int, stop: int) -> "TimeSeries":
        return TimeSeries(self.values[start:stop], self.column_names, self.sample_rate)


@dataclass(frozen=True)
class SplitSpec:
    """Train/val/test proportions, optionally pinned to explicit row borders.

    ``borders`` (when given) overrides the ratios: ``(b1, b2)`` or
    ``(b1, b2, end)``, where ``end`` truncates the series before splitting.
    """

    ratios: tuple[float, float, float] = (12.0, 4.0, 4.0)
    borders: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.ratios) != 3 or any(r < 0 for r in self.ratios):
            raise DataError(f"split ratios must be three nonnegative numbers: {self.ratios}")
        if sum(self.ratios) <= 0:
            raise DataError("split ratios must sum to a positive value")
        if self.borders is not None and len(self.borders) not in (2, 3):
            raise DataError(f"explicit borders need 2 or 3 indices, got {self.borders}")

    def resolve(self, length: int) -> tuple[int, int, int]:
        """Return ``(border_1, border_2, end)`` for a series of ``length`` rows."""
        if self.borders is not None:
            b1, b2 = self.borders[:2]
            end = self.borders[2] if len(self.borders) == 3 else length
        else:
            r_train, r_val, r_test = self.ratios
            total = r_train + r_val + r_test
            b1 = math.floor(length * r_train / total)
            b2 = math.floor(length * (r_train + r_val) / total)
            end = length
        if not 0 < b1 < b2 < end <= length:
            raise DataError(
                f"split borders ({b1}, {b2}, {end}) leave an empty segment "
                f"for a series of {length} rows"
            )
        return b1, b2, end


@dataclass(frozen=True)
class ScalerParams:
    means: np.ndarray
    stds: np.ndarray
    column_names: tuple[str, ...] = field(default=())


def load_table(
    path: str | Path,
    n_columns: int | None = None,
    timestamp: bool = True,
    sample_rate: str = "",
) -> TimeSeries:
    """Read a comma-separated file with one header row.

    When ``timestamp`` is set the first column is dropped. ``n_columns`` is
    the expected number of value columns (after the timestamp is removed).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty series (no header)") from None
        skip = 1 if timestamp else 0
        names = [h.strip() for h in header[skip:]]
        if n_columns is not None and len(names) != n_columns:
            raise DataError(
                f"{path}: expected {n_columns} value columns, header has {len(names)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}:{lineno}: ragged row ({len(row)} fields, header has {len(header)})"
                )
            try:
                rows.append([float(cell) for cell in row[skip:]])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric cell") from None
    if not rows:
        raise DataError(f"{path}: empty series")
    values = np.array(rows, dtype=np.float64)
    if not np.isfinite(values).all():
        bad = np.argwhere(~np.isfinite(values))[0]
        raise DataError(f"{path}:{bad[0] + 2}: NaN or infinite value in column {names[bad[1]]!r}")
    return TimeSeries(values, tuple(names), sample_rate)


def select_targets(ts: TimeSeries, target: str | None) -> TimeSeries:
    """Restrict to one named column (univariate) or pass through (``target=None``)."""
    if target is None:
        return ts
    try:
        j = ts.column_names.index(target)
    except ValueError:
        raise DataError(
            f"unknown target column {target!r}; available: {list(ts.column_names)}"
        ) from None
    return TimeSeries(ts.values[:, j : j + 1], (target,), ts.sample_rate)


def split(ts: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    b1, b2, end = spec.resolve(ts.length)
    return ts.rows(0, b1), ts.rows(b1, b2), ts.rows(b2, end)


def fit_scaler(train: TimeSeries) -> ScalerParams:
    """Per-column mean and population standard deviation of ``train``."""
    means = train.values.mean(axis=0)
    stds = train.values.std(axis=0)
    constant = [name for name, s in zip(train.column_names, stds) if not s > 0]
    if constant:
        raise DataError(f"constant column(s) in training segment: {constant}")
    return ScalerParams(means, stds, train.column_names)


def _check_dims(ts: TimeSeries, p: ScalerParams):
    if ts.width != len(p.means):
        raise DataError(
            f"scaler fitted on {len(p.means)} columns, series has {ts.width}"
        )


def apply_scaler(ts: TimeSeries, p: ScalerParams) -> TimeSeries:
    _check_dims(ts, p)
    return TimeSeries((ts.values - p.means) / p.stds, ts.column_names, ts.sample_rate)


def invert_scaler(ts: TimeSeries, p: ScalerParams) -> TimeSeries:
    _check_dims(ts, p)
    return TimeSeries(ts.values * p.stds + p.means, ts.column_names, ts.sample_rate)


def concat(parts: Sequence[TimeSeries]) -> TimeSeries:
    first = parts[0]
    return TimeSeries(
        np.concatenate([p.values for p in parts]), first.column_names, first.sample_rate
    )
