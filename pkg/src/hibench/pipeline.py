"""End-to-end runs: ingest, split, scale, window, predict, score, tabulate."""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from hibench.analysis import PeriodEstimate, SelectionResult, detect_period, select_predictor
from hibench.baselines import make_predictor
from hibench.config import LAST_COLUMN, DatasetConfig, HarnessConfig, effective_config
from hibench.data import TimeSeries, apply_scaler, fit_scaler, load_table, select_targets, split
from hibench.errors import DataError
from hibench.metrics import MetricReport, ReferenceScores, evaluate
from hibench.report import EXTENSIONS, build_table, render
from hibench.windowing import ForecastTask

log = logging.getLogger(__name__)


class StageFailure(Exception):
    """Wraps an error with the pipeline stage and dataset it came from."""

    def __init__(self, stage: str, dataset: str | None, cause: BaseException):
        self.stage = stage
        self.dataset = dataset
        self.cause = cause
        where = f"stage={stage}" + (f", dataset={dataset}" if dataset else "")
        super().__init__(f"[{where}] {cause}")


@contextmanager
def stage(name: str, dataset: str | None = None):
    try:
        yield
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(name, dataset, exc) from exc


def target_column(ds: DatasetConfig, ts: TimeSeries) -> str:
    if ds.target == LAST_COLUMN:
        return ts.column_names[-1]
    return ds.target


def load_dataset(ds: DatasetConfig) -> TimeSeries:
    with stage("ingest", ds.name):
        return load_table(ds.path, ds.columns, ds.timestamp, ds.sample_rate)


def prepare(ds: DatasetConfig, raw: TimeSeries, mode: str):
    """Select targets, split, and standardize with train-segment statistics.

    Returns ``(train, val, test, scaler, target)`` where val and test are
    scaled and train is left raw; ``target`` is None in multivariate mode.
    """
    with stage("split", ds.name):
        target = target_column(ds, raw) if mode == "univariate" else None
        ts = select_targets(raw, target)
        train, val, test = split(ts, ds.split)
    with stage("scale", ds.name):
        scaler = fit_scaler(train)
        val_s = apply_scaler(val, scaler)
        test_s = apply_scaler(test, scaler)
    return train, val_s, test_s, scaler, target


def _period_for(ds: DatasetConfig, cfg: HarnessConfig, train: TimeSeries, target: str | None) -> int:
    if ds.period is not None:
        return ds.period
    column = target or train.column_names[-1]
    series = train.values[:, train.column_names.index(column)]
    est = detect_period(series, cfg.selector.min_lag,
                        None if cfg.selector.max_lag is None else min(cfg.selector.max_lag, train.length - 2),
                        cfg.selector.threshold)
    if est.period is None:
        raise DataError(f"no period detected for seasonal_naive on {ds.name}; set period=")
    return est.period


@dataclass
class EvalOutput:
    reports: list[MetricReport]
    files: dict[str, str]  # file name -> content


def evaluate_dataset(
    ds: DatasetConfig, cfg: HarnessConfig, modes, jobs: int = 1, raw: TimeSeries | None = None
) -> list[MetricReport]:
    raw = load_dataset(ds) if raw is None else raw
    reports = []
    for mode in modes:
        train, _, test, _, target = prepare(ds, raw, mode)
        period = None
        if "seasonal_naive" in cfg.predictors:
            with stage("analyze", ds.name):
                period = _period_for(ds, cfg, train, target)
        for horizon in ds.horizons:
            with stage("evaluate", ds.name):
                task = ForecastTask(ds.lookback_for(horizon), horizon, ds.offset, target, ds.stride)
                for name in cfg.predictors:
                    predictor = make_predictor(name, period=period)
                    mse_v, mae_v, n = evaluate(test, task, predictor, jobs=jobs)
                    log.info("%s %s L_y=%d %s: mse=%.4f mae=%.4f (%d windows)",
                             ds.name, mode, horizon, name, mse_v, mae_v, n)
                    reports.append(MetricReport(
                        dataset=ds.name, mode=mode, predictor=name, horizon=horizon,
                        lookback=task.lookback, offset=task.offset, stride=task.stride,
                        window_count=n, mse=mse_v, mae=mae_v, reference=ds.reference,
                    ))
    return reports


def reports_json(reports: list[MetricReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def read_reports(path: str | Path) -> list[MetricReport]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [MetricReport.from_dict(d) for d in doc]


def tables(reports: list[MetricReport], refs: ReferenceScores, fmt: str) -> dict[str, str]:
    out = {}
    for mode in ("univariate", "multivariate"):
        subset = [r for r in reports if r.mode == mode]
        if subset:
            with stage("report"):
                out[f"table_{mode}.{EXTENSIONS[fmt]}"] = render(build_table(subset, refs), fmt)
    return out


def run_eval(
    cfg: HarnessConfig,
    datasets=None,
    modes=None,
    fmt: str | None = None,
    jobs: int | None = None,
    refs: ReferenceScores | None = None,
) -> EvalOutput:
    """Compute every configured cell and the rendered outputs, without writing."""
    refs = ReferenceScores.bundled() if refs is None else refs
    chosen = [cfg.dataset(n) for n in datasets] if datasets else cfg.datasets
    modes = tuple(modes or cfg.modes)
    fmt = fmt or cfg.format
    jobs = jobs or cfg.jobs
    reports: list[MetricReport] = []
    for ds in chosen:
        reports.extend(evaluate_dataset(ds, cfg, modes, jobs))
    files = {"reports.json": reports_json(reports)}
    files.update(tables(reports, refs, fmt))
    files["effective_config.ini"] = effective_config(cfg)
    return EvalOutput(reports, files)


def write_outputs(files: dict[str, str], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    with stage("write"):
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, content in files.items():
            path = out_dir / name
            path.write_text(content, encoding="utf-8")
            written.append(path)
    return written


def run_select(
    cfg: HarnessConfig,
    dataset: str,
    mode: str,
    horizon: int,
    lookback: int | None = None,
    jobs: int | None = None,
) -> SelectionResult:
    ds = cfg.dataset(dataset)
    raw = load_dataset(ds)
    train, val, _, scaler, target = prepare(ds, raw, mode)
    sel = cfg.selector
    with stage("select", ds.name):
        train_s = apply_scaler(train, scaler)
        if lookback is None:
            lookback = ds.lookback_for(horizon) if horizon in ds.horizons else horizon
        task = ForecastTask(lookback, horizon, ds.offset, target, ds.stride)
        return select_predictor(
            train_s, val, task,
            candidates=sel.candidates, alphas=sel.alphas, min_lag=sel.min_lag,
            max_lag=sel.max_lag, threshold=sel.threshold, objective=sel.objective,
            jobs=jobs or cfg.jobs,
        )


def run_detect_period(cfg: HarnessConfig, dataset: str, column: str | None = None) -> PeriodEstimate:
    """Period of one raw column over the whole file (scaling leaves the ACF unchanged)."""
    ds = cfg.dataset(dataset)
    raw = load_dataset(ds)
    with stage("analyze", ds.name):
        name = column or target_column(ds, raw)
        ts = select_targets(raw, name)
        sel = cfg.selector
        max_lag = sel.max_lag
        if max_lag is not None:
            max_lag = min(max_lag, ts.length - 2)
        return detect_period(ts.values[:, 0], sel.min_lag, max_lag, sel.threshold)
