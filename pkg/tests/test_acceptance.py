"""Acceptance checks, one ``acceptance(n)`` marker per criterion.

Run alone with ``pytest -m acceptance``; the terminal summary prints one
PASS/FAIL/SKIP line per criterion.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hibench import pipeline
from hibench.analysis import detect_period, select_predictor
from hibench.baselines import hi_forecast, hybrid_forecast, mean_forecast, make_predictor
from hibench.cli import main
from hibench.config import DATA_ROOT_ENV, load_config
from hibench.data import SplitSpec, TimeSeries, split
from hibench.metrics import evaluate, mae, mse, relative_improvement
from hibench.report import color, format_improvement
from hibench.windowing import ForecastTask, enumerate_windows, window_count

from conftest import sine
from oracles import loop_metrics, placements

PROTOCOL_INI = Path(__file__).parents[1] / "src" / "hibench" / "configs" / "published.ini"
CALENDAR_BORDERS = (8640, 11520, 14400)


def _real_data(name):
    root = os.environ.get(DATA_ROOT_ENV)
    if not root or not (Path(root) / f"{name}.csv").is_file():
        pytest.skip(f"{name}.csv not found under ${DATA_ROOT_ENV}; public ETT files required")
    return load_config(PROTOCOL_INI)


def _score(cfg, name, mode, horizon, borders=None):
    ds = cfg.dataset(name)
    ds.horizons = (horizon,)
    if borders is not None:
        ds.split = SplitSpec(borders=borders)
    start = time.perf_counter()
    (rep,) = pipeline.evaluate_dataset(ds, cfg, (mode,))
    return rep, time.perf_counter() - start


# -- 1 -----------------------------------------------------------------------

@pytest.mark.acceptance(1)
def test_etth1_univariate_h24():
    cfg = _real_data("ETTh1")
    cfg.predictors = ("hi",)
    rep, elapsed = _score(cfg, "ETTh1", "univariate", 24)
    assert rep.mse == pytest.approx(0.046, rel=0.15)
    assert rep.mae == pytest.approx(0.166, rel=0.15)
    assert elapsed < 120


@pytest.mark.acceptance(1)
def test_etth2_multivariate_h24():
    cfg = _real_data("ETTh2")
    cfg.predictors = ("hi",)
    rep, elapsed = _score(cfg, "ETTh2", "multivariate", 24)
    assert rep.mse == pytest.approx(0.266, rel=0.15)
    assert elapsed < 120


@pytest.mark.acceptance(1)
def test_calendar_borders_tighten_to_five_percent():
    cfg = _real_data("ETTh1")
    _real_data("ETTh2")
    cfg.predictors = ("hi",)
    uni, _ = _score(cfg, "ETTh1", "univariate", 24, CALENDAR_BORDERS)
    multi, _ = _score(cfg, "ETTh2", "multivariate", 24, CALENDAR_BORDERS)
    assert uni.mse == pytest.approx(0.046, rel=0.05)
    assert uni.mae == pytest.approx(0.166, rel=0.05)
    assert multi.mse == pytest.approx(0.266, rel=0.05)


# -- 2 -----------------------------------------------------------------------

@st.composite
def metric_instances(draw):
    n = draw(st.integers(1, 50))
    rows = draw(st.integers(1, 48))
    cols = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return rng.uniform(-10, 10, (2, n, rows, cols))


@pytest.mark.acceptance(2)
@settings(max_examples=200, deadline=None, derandomize=True)
@given(metric_instances())
def test_metrics_match_loop_oracle(arr):
    preds, truths = list(arr[0]), list(arr[1])
    want_mse, want_mae = loop_metrics(preds, truths)
    assert abs(mse(preds, truths) - want_mse) <= 1e-12
    assert abs(mae(preds, truths) - want_mae) <= 1e-12


# -- 3 -----------------------------------------------------------------------

@pytest.mark.acceptance(3)
def test_improvement_values_and_colors():
    up = relative_improvement(0.092, 0.046)
    down = relative_improvement(0.204, 0.872)
    assert up == pytest.approx(0.50, abs=0.005)
    assert down == pytest.approx(-3.27, abs=0.005)
    assert (color(up), color(down)) == ("green", "red")
    assert format_improvement(up) == "+50% (green)"
    assert format_improvement(down) == "-327% (red)"


# -- 4 -----------------------------------------------------------------------

def _raw_sine_test_segment():
    ts = TimeSeries(sine(9600, 96)[:, None], ("y",))
    return split(ts, SplitSpec())[2]


@pytest.mark.acceptance(4)
def test_hi_exact_when_horizon_is_one_period():
    test = _raw_sine_test_segment()
    value, _, n = evaluate(test, ForecastTask(96, 96), make_predictor("hi"))
    assert n > 0
    assert value <= 1e-20


@pytest.mark.acceptance(4)
def test_hi_anti_phase_at_half_period():
    test = _raw_sine_test_segment()
    value, _, _ = evaluate(test, ForecastTask(48, 48), make_predictor("hi"))
    assert value == pytest.approx(2.0, rel=0.05)


# -- 5 -----------------------------------------------------------------------

@pytest.mark.acceptance(5)
@pytest.mark.parametrize("period", [12, 24, 96])
def test_period_of_pure_sinusoid(period):
    est = detect_period(sine(10 * period, period), max_lag=4 * period)
    assert est.period == period
    est = detect_period(sine(100 * period, period), max_lag=4 * period)
    assert est.period == period


@pytest.mark.acceptance(5)
def test_white_noise_has_no_period():
    noise = np.random.default_rng(2024).standard_normal(10000)
    assert detect_period(noise, threshold=0.3).period is None


# -- 6 -----------------------------------------------------------------------

@pytest.mark.acceptance(6)
def test_hybrid_alpha_one_is_hi():
    x = np.random.default_rng(3).normal(size=(96, 4))
    hi = hi_forecast(x, 48)
    out = hybrid_forecast(hi, mean_forecast(x, 48), 1.0)
    assert out.tobytes() == hi.tobytes()
    blended = make_predictor("hybrid", alpha=1.0, base="mean")(x, 48)
    assert blended.tobytes() == hi.tobytes()


@pytest.mark.acceptance(6)
@pytest.mark.parametrize("horizon, want_hi", [(96, True), (48, False)])
def test_selector_on_sine(sine_config, horizon, want_hi):
    cfg = load_config(sine_config)
    result = pipeline.run_select(cfg, "sine", "univariate", horizon)
    assert (result.chosen.name == "hi") is want_hi
    assert set(cfg.selector.candidates) == {"hi", "mean", "hybrid"}
    best = min(s[0] for s in result.scores.values())
    assert result.scores[result.chosen.label][0] == best
    assert len(result.scores) == 1 + 1 + 11  # hi, mean, eleven hybrid weights


# -- 7 -----------------------------------------------------------------------

@pytest.mark.acceptance(7)
@settings(max_examples=500, deadline=None, derandomize=True)
@given(
    n=st.integers(1, 400),
    horizon=st.integers(1, 60),
    extra=st.integers(0, 60),
    offset=st.integers(1, 30),
    stride=st.integers(1, 12),
)
def test_window_count_formula(n, horizon, extra, offset, stride):
    task = ForecastTask(horizon + extra, horizon, offset, stride=stride)
    brute = placements(n, task.lookback, horizon, offset, stride)
    formula = (n - task.lookback - (offset - 1) - horizon) // stride + 1
    if formula < 1:
        assert brute == []
        return
    assert window_count(n, task) == formula == len(brute)
    assert [w.input_start for w in enumerate_windows(n, task)] == brute


# -- 8 -----------------------------------------------------------------------

@pytest.mark.acceptance(8)
def test_two_runs_byte_identical(fixture_suite, tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["eval", "--config", str(fixture_suite), "--out-dir", str(out)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    capsys.readouterr()
    assert outs[0] == outs[1]
    assert "reports.json" in outs[0]


@pytest.mark.acceptance(8)
def test_serial_and_parallel_agree(fixture_suite, tmp_path, capsys):
    cfg = load_config(fixture_suite)
    serial = pipeline.run_eval(cfg, jobs=1).reports
    parallel = pipeline.run_eval(cfg, jobs=4).reports
    assert len(serial) == len(parallel)
    for a, b in zip(serial, parallel):
        assert (a.dataset, a.mode, a.predictor, a.horizon) == (b.dataset, b.mode, b.predictor, b.horizon)
        assert abs(a.mse - b.mse) <= 1e-9 and abs(a.mae - b.mae) <= 1e-9
    # small chunks force real fan-out across worker threads
    ds = cfg.dataset("hourly")
    test = pipeline.prepare(ds, pipeline.load_dataset(ds), "multivariate")[2]
    task = ForecastTask(24, 24)
    one = evaluate(test, task, make_predictor("hi"), jobs=1)
    many = evaluate(test, task, make_predictor("hi"), jobs=4, chunk=7)
    assert abs(one[0] - many[0]) <= 1e-9 and abs(one[1] - many[1]) <= 1e-9
    assert one[2] == many[2]


@pytest.mark.acceptance(8)
def test_cli_jobs_flag_agrees(fixture_suite, tmp_path, capsys):
    import json
    docs = []
    for jobs in (1, 3):
        out = tmp_path / f"j{jobs}"
        assert main(["eval", "--config", str(fixture_suite), "--out-dir", str(out),
                     "--jobs", str(jobs)]) == 0
        docs.append(json.loads((out / "reports.json").read_text()))
    capsys.readouterr()
    for a, b in zip(*docs):
        assert abs(a["mse"] - b["mse"]) <= 1e-9 and abs(a["mae"] - b["mae"]) <= 1e-9
