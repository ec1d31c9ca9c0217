"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hibench import pipeline
from hibench.config import load_config, parse_mode
from hibench.errors import ConfigError, DataError
from hibench.metrics import ReferenceScores
from hibench.report import FORMATS, build_table, render

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

FORMAT_ALIASES = {"md": "markdown", "markdown": "markdown", "plain": "plain", "txt": "plain",
                  "csv": "delimited", "delimited": "delimited"}


def _format(value: str) -> str:
    try:
        return FORMAT_ALIASES[value]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown format {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hibench",
        description="Historical-inertia baseline and long-horizon forecasting benchmark harness.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="score predictors on test windows and write reports")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", action="append", help="restrict to this dataset (repeatable)")
    p.add_argument("--mode", choices=("uni", "multi"), help="restrict to one variate mode")
    p.add_argument("--format", type=_format, help=f"table format: {', '.join(FORMATS)}")
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("select", help="choose among HI, base and hybrid predictors on validation")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", choices=("uni", "multi"), default="uni")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--lookback", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("detect-period", help="print the ACF period estimate of one column as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--column", help="defaults to the dataset's target column")

    p = sub.add_parser("render", help="render comparison tables from a reports.json file")
    p.add_argument("reports")
    p.add_argument("--mode", choices=("uni", "multi"))
    p.add_argument("--format", type=_format, default="markdown")
    p.add_argument("--out", help="write to this file instead of stdout")
    return parser


def _cmd_eval(args) -> int:
    cfg = load_config(args.config)
    modes = (parse_mode(args.mode),) if args.mode else None
    out = pipeline.run_eval(cfg, datasets=args.dataset, modes=modes, fmt=args.format, jobs=args.jobs)
    out_dir = Path(args.out_dir) if args.out_dir else cfg.out_dir
    for path in pipeline.write_outputs(out.files, out_dir):
        print(path)
    return EXIT_OK


def _cmd_select(args) -> int:
    cfg = load_config(args.config)
    mode = parse_mode(args.mode)
    result = pipeline.run_select(cfg, args.dataset, mode, args.horizon, args.lookback, args.jobs)
    name = f"selection_{args.dataset}_{mode}_{args.horizon}.json"
    out_dir = Path(args.out_dir) if args.out_dir else cfg.out_dir
    for path in pipeline.write_outputs({name: result.to_json()}, out_dir):
        print(path)
    return EXIT_OK


def _cmd_detect(args) -> int:
    cfg = load_config(args.config)
    est = pipeline.run_detect_period(cfg, args.dataset, args.column)
    print(json.dumps(est.to_dict()))
    return EXIT_OK


def _cmd_render(args) -> int:
    with pipeline.stage("render"):
        reports = pipeline.read_reports(args.reports)
        if args.mode:
            reports = [r for r in reports if r.mode == parse_mode(args.mode)]
        refs = ReferenceScores.bundled()
        modes = [m for m in ("univariate", "multivariate") if any(r.mode == m for r in reports)]
        if not modes:
            raise DataError(f"{args.reports}: no reports to render")
        text = "\n".join(
            render(build_table([r for r in reports if r.mode == m], refs), args.format)
            for m in modes
        )
    if args.out:
        pipeline.write_outputs({Path(args.out).name: text}, Path(args.out).parent)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"eval": _cmd_eval, "select": _cmd_select, "detect-period": _cmd_detect,
            "render": _cmd_render}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, pipeline.StageFailure):
        exc = exc.cause
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (DataError, OSError)):
        return EXIT_DATA
    return EXIT_RUNTIME


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # mapped to an exit code with a stage-tagged message
        code = exit_code(exc)
        tag = "" if isinstance(exc, pipeline.StageFailure) else "[stage=config] " if code == EXIT_CONFIG else ""
        print(f"hibench: error {tag}{exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
