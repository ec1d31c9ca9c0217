"""Comparison tables laid out like the published benchmark tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from hibench.metrics import MetricReport, ReferenceScores, best_reference, relative_improvement

METRICS = ("MSE", "MAE")
PRECISION = 3
FORMATS = ("plain", "markdown", "delimited")


@dataclass
class Row:
    model: str
    metric: str
    values: list  # float | None per column
    reference: bool = True
    suspect: list = field(default_factory=list)  # bool per column


@dataclass
class ComparisonTable:
    mode: str
    columns: list[tuple[str, int]]
    rows: list[Row]
    improvement: dict[str, list]  # metric -> signed ratio | None per column
    best: dict[str, list[set]]  # metric -> best model names per column
    footnotes: list[str] = field(default_factory=list)

    def row(self, model: str, metric: str) -> Row:
        for r in self.rows:
            if r.model == model and r.metric == metric:
                return r
        raise KeyError((model, metric))


def _display_name(predictor: str) -> str:
    return "HI" if predictor == "hi" else predictor


def build_table(
    reports: list[MetricReport], refs: ReferenceScores, include_suspect: bool = False
) -> ComparisonTable:
    """Assemble published rows, harness rows and HI's signed improvement row."""
    if not reports:
        raise ValueError("no metric reports to tabulate")
    modes = {r.mode for r in reports}
    if len(modes) != 1:
        raise ValueError(f"reports mix modes {sorted(modes)}; build one table per mode")
    mode = modes.pop()

    columns: list[tuple[str, int]] = []
    reference_of: dict[str, str | None] = {}
    predictors: list[str] = []
    cells: dict[tuple[str, str, int], MetricReport] = {}
    for r in reports:
        col = (r.dataset, r.horizon)
        if col not in columns:
            columns.append(col)
        reference_of.setdefault(r.dataset, r.reference)
        if r.predictor not in predictors:
            predictors.append(r.predictor)
        cells[(r.predictor, r.dataset, r.horizon)] = r
    for ds, h in columns:
        if ("hi", ds, h) not in cells:
            raise ValueError(f"missing HI result for {ds} horizon {h}")
    predictors = ["hi"] + [p for p in predictors if p != "hi"]

    rows: list[Row] = []
    footnotes: list[str] = []
    any_ref = any(reference_of[ds] for ds, _ in columns)
    if any_ref:
        for model in refs.models[mode]:
            for metric in METRICS:
                values, suspect = [], []
                for ds, h in columns:
                    ref = reference_of[ds]
                    if ref is None:
                        values.append(None)
                        suspect.append(False)
                        continue
                    try:
                        entries = refs.entries(ref, mode, h, metric)
                    except KeyError:
                        raise KeyError(
                            f"no published scores for {ref} {mode} horizon {h} {metric}"
                        ) from None
                    hit = next((e for e in entries if e.model == model), None)
                    values.append(None if hit is None else hit.value)
                    suspect.append(bool(hit and hit.suspect and not include_suspect))
                rows.append(Row(model, metric, values, True, suspect))
        if any(any(r.suspect) for r in rows):
            footnotes.append(
                "^ published value flagged as a likely transcription slip; "
                "left out of best-of and improvement"
            )
    for pred in predictors:
        for metric in METRICS:
            values = []
            for ds, h in columns:
                rep = cells.get((pred, ds, h))
                values.append(None if rep is None else getattr(rep, metric.lower()))
            rows.append(Row(_display_name(pred), metric, values, False, [False] * len(columns)))

    best: dict[str, list[set]] = {}
    for metric in METRICS:
        best[metric] = []
        for j, (ds, h) in enumerate(columns):
            scored = [
                (round(r.values[j], PRECISION), r.model)
                for r in rows
                if r.metric == metric and r.values[j] is not None and not r.suspect[j]
            ]
            low = min(v for v, _ in scored)
            winners = {m for v, m in scored if v == low}
            if len(winners) > 1:
                footnotes.append(
                    f"{metric} tie at {PRECISION} decimals on {ds}/{h}: "
                    + ", ".join(sorted(winners))
                )
            best[metric].append(winners)

    improvement: dict[str, list] = {}
    for metric in METRICS:
        improvement[metric] = []
        for ds, h in columns:
            ref = reference_of[ds]
            if ref is None:
                improvement[metric].append(None)
                continue
            _, sota = best_reference(refs, ref, mode, h, metric, include_suspect)
            hi = getattr(cells[("hi", ds, h)], metric.lower())
            improvement[metric].append(relative_improvement(sota, hi))

    return ComparisonTable(mode, columns, rows, improvement, best, footnotes)


def percent(ratio: float) -> int:
    """Magnitude in whole percent, halves rounded away from zero."""
    return int(math.floor(abs(ratio) * 100 + 0.5))


def color(ratio: float) -> str:
    if ratio > 0:
        return "green"
    if ratio < 0:
        return "red"
    return "even"


def format_improvement(ratio: float | None) -> str:
    if ratio is None:
        return "-"
    sign = "+" if ratio > 0 else "-" if ratio < 0 else ""
    return f"{sign}{percent(ratio)}% ({color(ratio)})"


def _cell_text(table: ComparisonTable, row: Row, j: int, bold: tuple[str, str]) -> str:
    v = row.values[j]
    if v is None:
        return "-"
    text = f"{v:.{PRECISION}f}"
    if row.suspect[j]:
        text += "^"
    if row.model in table.best[row.metric][j]:
        text = f"{bold[0]}{text}{bold[1]}"
    return text


def _column_labels(table: ComparisonTable) -> list[str]:
    return [f"{ds}/{h}" for ds, h in table.columns]


def _grid(table: ComparisonTable, bold: tuple[str, str]) -> list[list[str]]:
    lines = []
    for row in table.rows:
        lines.append(
            [row.model, row.metric]
            + [_cell_text(table, row, j, bold) for j in range(len(table.columns))]
        )
    for metric in METRICS:
        lines.append(["Improve", metric] + [format_improvement(v) for v in table.improvement[metric]])
    return lines


def render_markdown(table: ComparisonTable) -> str:
    header = ["Method", "Metric"] + _column_labels(table)
    out = [f"### {table.mode} comparison", ""]
    out.append("| " + " | ".join(header) + " |")
    out.append("|" + "|".join(["---"] * 2 + ["---:"] * len(table.columns)) + "|")
    for line in _grid(table, ("**", "**")):
        out.append("| " + " | ".join(line) + " |")
    if table.footnotes:
        out.append("")
        out.extend(f"- {note}" for note in table.footnotes)
    return "\n".join(out) + "\n"


def render_plain(table: ComparisonTable) -> str:
    header = ["Method", "Metric"] + _column_labels(table)
    grid = [header] + _grid(table, ("[", "]"))
    widths = [max(len(r[i]) for r in grid) for i in range(len(header))]
    out = [f"{table.mode} comparison (best in brackets)"]
    for k, r in enumerate(grid):
        cells = [r[0].ljust(widths[0]), r[1].ljust(widths[1])]
        cells += [c.rjust(w) for c, w in zip(r[2:], widths[2:])]
        out.append("  ".join(cells).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    out.extend(table.footnotes)
    return "\n".join(out) + "\n"


def render_delimited(table: ComparisonTable) -> str:
    """CSV with one row per (model, metric); values at full precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "metric"] + _column_labels(table))
    for row in table.rows:
        writer.writerow([row.model, row.metric] + ["" if v is None else repr(v) for v in row.values])
    for metric in METRICS:
        writer.writerow(
            ["Improve", metric]
            + ["" if v is None else repr(v) for v in table.improvement[metric]]
        )
    return buf.getvalue()


def parse_delimited(text: str) -> tuple[list[tuple[str, int]], dict[tuple[str, str], list]]:
    """Inverse of :func:`render_delimited`: columns and values per (model, metric)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    columns = []
    for label in header[2:]:
        ds, _, h = label.rpartition("/")
        columns.append((ds, int(h)))
    values = {}
    for rec in reader:
        values[(rec[0], rec[1])] = [None if c == "" else float(c) for c in rec[2:]]
    return columns, values


def render(table: ComparisonTable, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(table)
    if fmt == "plain":
        return render_plain(table)
    if fmt == "delimited":
        return render_delimited(table)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


EXTENSIONS = {"markdown": "md", "plain": "txt", "delimited": "csv"}
