"""Harness configuration: an INI file with ``[harness]``, ``[selector]`` and
one ``[dataset NAME]`` section per dataset.

Datasets named like the standard benchmarks (ETTh1, ETTh2, ETTm1,
Electricity) inherit their column counts, targets, splits and horizon grids
unless the section overrides them.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from hibench.analysis import DEFAULT_ALPHAS, DEFAULT_THRESHOLD
from hibench.baselines import PREDICTORS
from hibench.data import SplitSpec
from hibench.errors import ConfigError

DATA_ROOT_ENV = "HIBENCH_DATA_ROOT"
LAST_COLUMN = "@last"

MODE_ALIASES = {
    "uni": "univariate", "univariate": "univariate", "s": "univariate",
    "multi": "multivariate", "multivariate": "multivariate", "m": "multivariate",
}

STANDARD_DATASETS = {
    "ETTh1": dict(path="ETTh1.csv", columns=7, target="OT", sample_rate="1h",
                  split=(12, 4, 4), horizons=(24, 48, 168, 336, 720)),
    "ETTh2": dict(path="ETTh2.csv", columns=7, target="OT", sample_rate="1h",
                  split=(12, 4, 4), horizons=(24, 48, 168, 336, 720)),
    "ETTm1": dict(path="ETTm1.csv", columns=7, target="OT", sample_rate="15min",
                  split=(12, 4, 4), horizons=(24, 48, 96, 288, 672)),
    "Electricity": dict(path="ECL.csv", columns=321, target=LAST_COLUMN, sample_rate="1h",
                        split=(15, 3, 4), horizons=(48, 168, 336, 720, 960)),
}

_HARNESS_KEYS = {"predictors", "modes", "format", "out_dir", "jobs", "data_root"}
_SELECTOR_KEYS = {"candidates", "alphas", "min_lag", "max_lag", "threshold", "objective"}
_DATASET_KEYS = {"path", "columns", "timestamp", "target", "sample_rate", "split", "borders",
                 "horizons", "lookback", "offset", "stride", "reference", "period"}


@dataclass
class DatasetConfig:
    name: str
    path: Path
    columns: int | None
    timestamp: bool = True
    target: str = "OT"
    sample_rate: str = ""
    split: SplitSpec = field(default_factory=SplitSpec)
    horizons: tuple[int, ...] = ()
    lookback: tuple[int, ...] | None = None  # None: lookback equals horizon
    offset: int = 1
    stride: int = 1
    reference: str | None = None
    period: int | None = None  # seasonal_naive period; detected when unset

    def lookback_for(self, horizon: int) -> int:
        if self.lookback is None:
            return horizon
        if len(self.lookback) == 1:
            return self.lookback[0]
        return self.lookback[self.horizons.index(horizon)]


@dataclass
class SelectorConfig:
    candidates: tuple[str, ...] = ("hi", "mean", "seasonal_naive", "hybrid")
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    min_lag: int = 2
    max_lag: int | None = None
    threshold: float = DEFAULT_THRESHOLD
    objective: str = "mse"


@dataclass
class HarnessConfig:
    datasets: list[DatasetConfig]
    predictors: tuple[str, ...] = ("hi",)
    modes: tuple[str, ...] = ("univariate", "multivariate")
    format: str = "markdown"
    out_dir: Path = Path("results")
    jobs: int = 1
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    source: Path | None = None

    def dataset(self, name: str) -> DatasetConfig:
        for ds in self.datasets:
            if ds.name == name:
                return ds
        raise ConfigError(
            f"dataset {name!r} is not declared; known: {[d.name for d in self.datasets]}"
        )


def _list(value: str) -> list[str]:
    return [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]


def _int(section: str, key: str, value: str, minimum: int = 1) -> int:
    try:
        out = int(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {value!r}") from None
    if out < minimum:
        raise ConfigError(f"[{section}] {key}: must be >= {minimum}, got {out}")
    return out


def _ints(section: str, key: str, value: str, minimum: int = 1) -> tuple[int, ...]:
    out = tuple(_int(section, key, v, minimum) for v in _list(value))
    if not out:
        raise ConfigError(f"[{section}] {key}: empty list")
    return out


def _float(section: str, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {value!r}") from None


def parse_mode(value: str) -> str:
    try:
        return MODE_ALIASES[value.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown mode {value!r}; use uni or multi") from None


def _check_keys(section: str, present, allowed):
    unknown = sorted(set(present) - allowed)
    if unknown:
        raise ConfigError(f"[{section}] unknown key(s): {', '.join(unknown)}")


def _split(section: str, sec) -> SplitSpec:
    ratios = STANDARD_DATASETS.get(section, {}).get("split", (12, 4, 4))
    if "split" in sec:
        parts = sec["split"].replace(",", ":").split(":")
        if len(parts) != 3:
            raise ConfigError(f"[{section}] split: expected three ratios like 12:4:4")
        ratios = tuple(_float(section, "split", p) for p in parts)
        if any(r < 0 for r in ratios) or sum(ratios) <= 0:
            raise ConfigError(f"[{section}] split: ratios must be nonnegative with positive sum")
    borders = None
    if sec.get("borders", "").strip():
        borders = _ints(section, "borders", sec["borders"], minimum=1)
        if len(borders) not in (2, 3):
            raise ConfigError(f"[{section}] borders: give 2 or 3 row indices")
    return SplitSpec(tuple(float(r) for r in ratios), borders)


def _data_root(harness, base: Path) -> Path:
    env = os.environ.get(DATA_ROOT_ENV)
    if env:
        return Path(env)
    if harness.get("data_root", "").strip():
        root = Path(harness["data_root"].strip())
        return root if root.is_absolute() else base / root
    return base


def _dataset(name: str, sec, root: Path) -> DatasetConfig:
    section = f"dataset {name}"
    _check_keys(section, sec.keys(), _DATASET_KEYS)
    std = STANDARD_DATASETS.get(name, {})
    raw_path = sec.get("path", std.get("path"))
    if not raw_path:
        raise ConfigError(f"[{section}] path is required")
    path = Path(raw_path)
    if not path.is_absolute():
        path = root / path
    columns = _int(section, "columns", sec["columns"]) if sec.get("columns", "").strip() else std.get("columns")
    horizons = _ints(section, "horizons", sec["horizons"]) if "horizons" in sec else std.get("horizons")
    if not horizons:
        raise ConfigError(f"[{section}] horizons are required")
    lookback = None
    if sec.get("lookback", "").strip():
        lookback = _ints(section, "lookback", sec["lookback"])
        if len(lookback) not in (1, len(horizons)):
            raise ConfigError(f"[{section}] lookback: give one value or one per horizon")
    reference = sec.get("reference", name if std else "").strip()
    if reference.lower() in ("", "none"):
        reference = None
    period = _int(section, "period", sec["period"]) if sec.get("period", "").strip() else None
    try:
        timestamp = sec.getboolean("timestamp", fallback=True)
    except ValueError:
        raise ConfigError(f"[{section}] timestamp: expected yes/no") from None
    return DatasetConfig(
        name=name,
        path=path,
        columns=columns,
        timestamp=timestamp,
        target=sec.get("target", std.get("target", "OT")).strip(),
        sample_rate=sec.get("sample_rate", std.get("sample_rate", "")).strip(),
        split=_split(name, sec),
        horizons=tuple(horizons),
        lookback=lookback,
        offset=_int(section, "offset", sec.get("offset", "1")),
        stride=_int(section, "stride", sec.get("stride", "1")),
        reference=reference,
        period=period,
    )


def parse_config(text: str, base: str | Path = ".", source: Path | None = None) -> HarnessConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    base = Path(base)
    harness = parser["harness"] if parser.has_section("harness") else {}
    _check_keys("harness", harness.keys(), _HARNESS_KEYS)
    root = _data_root(harness, base)

    datasets = []
    for section in parser.sections():
        if section in ("harness", "selector"):
            continue
        kind, _, name = section.partition(" ")
        if kind != "dataset" or not name.strip():
            raise ConfigError(f"unknown section [{section}]")
        datasets.append(_dataset(name.strip(), parser[section], root))
    if not datasets:
        raise ConfigError("config declares no [dataset NAME] sections")
    names = [d.name for d in datasets]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate dataset names in {names}")

    predictors = tuple(_list(harness.get("predictors", "hi"))) or ("hi",)
    for p in predictors:
        if p not in PREDICTORS or p == "hybrid":
            raise ConfigError(f"[harness] predictors: unsupported {p!r} (use hi, mean, seasonal_naive)")
    if "hi" not in predictors:
        predictors = ("hi",) + predictors
    modes = tuple(parse_mode(m) for m in _list(harness.get("modes", "uni, multi")))
    fmt = harness.get("format", "markdown").strip()
    if fmt not in ("plain", "markdown", "delimited"):
        raise ConfigError(f"[harness] format: unknown {fmt!r}")
    out_dir = Path(harness.get("out_dir", "results").strip())
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    sel = parser["selector"] if parser.has_section("selector") else {}
    _check_keys("selector", sel.keys(), _SELECTOR_KEYS)
    defaults = SelectorConfig()
    candidates = tuple(_list(sel.get("candidates", ", ".join(defaults.candidates))))
    for c in candidates:
        if c not in PREDICTORS:
            raise ConfigError(f"[selector] candidates: unknown {c!r}")
    alphas = defaults.alphas
    if "alphas" in sel:
        alphas = tuple(_float("selector", "alphas", a) for a in _list(sel["alphas"]))
        if not alphas or any(not 0 <= a <= 1 for a in alphas):
            raise ConfigError("[selector] alphas: weights must lie in [0, 1]")
    min_lag = _int("selector", "min_lag", sel.get("min_lag", "2"))
    max_lag = _int("selector", "max_lag", sel["max_lag"]) if sel.get("max_lag", "").strip() else None
    if max_lag is not None and max_lag < min_lag:
        raise ConfigError(f"[selector] lag range [{min_lag}, {max_lag}] is empty")
    objective = sel.get("objective", "mse").strip().lower()
    if objective not in ("mse", "mae"):
        raise ConfigError("[selector] objective: use mse or mae")
    selector = SelectorConfig(candidates, alphas, min_lag, max_lag,
                              _float("selector", "threshold", sel.get("threshold", str(DEFAULT_THRESHOLD))),
                              objective)

    return HarnessConfig(
        datasets=datasets,
        predictors=predictors,
        modes=modes,
        format=fmt,
        out_dir=out_dir,
        jobs=_int("harness", "jobs", harness.get("jobs", "1")),
        selector=selector,
        source=source,
    )


def load_config(path: str | Path) -> HarnessConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), base=path.parent, source=path)


def _fmt_list(values) -> str:
    return ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in values)


def effective_config(cfg: HarnessConfig) -> str:
    """Fully resolved configuration, as INI text, for the run record."""
    lines = [
        "[harness]",
        f"predictors = {_fmt_list(cfg.predictors)}",
        f"modes = {_fmt_list(cfg.modes)}",
        f"format = {cfg.format}",
        f"jobs = {cfg.jobs}",
        "",
        "[selector]",
        f"candidates = {_fmt_list(cfg.selector.candidates)}",
        f"alphas = {_fmt_list(cfg.selector.alphas)}",
        f"min_lag = {cfg.selector.min_lag}",
        f"max_lag = {'' if cfg.selector.max_lag is None else cfg.selector.max_lag}",
        f"threshold = {cfg.selector.threshold:g}",
        f"objective = {cfg.selector.objective}",
    ]
    for ds in cfg.datasets:
        split = ds.split
        lines += [
            "",
            f"[dataset {ds.name}]",
            f"path = {ds.path.name}",
            f"columns = {'' if ds.columns is None else ds.columns}",
            f"timestamp = {'yes' if ds.timestamp else 'no'}",
            f"target = {ds.target}",
            f"sample_rate = {ds.sample_rate}",
            f"split = {':'.join(f'{r:g}' for r in split.ratios)}",
            f"borders = {'' if split.borders is None else _fmt_list(split.borders)}",
            f"horizons = {_fmt_list(ds.horizons)}",
            f"lookback = {_fmt_list(ds.lookback_for(h) for h in ds.horizons)}",
            f"offset = {ds.offset}",
            f"stride = {ds.stride}",
            f"reference = {ds.reference or 'none'}",
            f"period = {'' if ds.period is None else ds.period}",
        ]
    return "\n".join(line.rstrip() for line in lines) + "\n"
