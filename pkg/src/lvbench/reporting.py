"""Percent tables (CSV/Markdown), radar-plot series and correlation exports from report files."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from .aggregate import DEFAULT_CORRELATION_PAIRS, correlation_table
from .core import DIMENSIONS, ScoreReport, format_percent

FORMATS = ("csv", "markdown")

DIMENSION_LABELS = {
    "static_quality": "Static Quality",
    "text_video_alignment": "Text-Video Alignment",
    "temporal_quality": "Temporal Quality",
    "content_clarity": "Content Clarity",
    "herd": "HERD",
}


def _label(metric_id: str) -> str:
    return DIMENSION_LABELS.get(metric_id) or metric_id.replace("_", " ").title()


def load_report(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _table(reports: Sequence[Mapping[str, Any]], columns: Sequence[tuple[str, str]]) -> tuple[list[str], list[list[str]]]:
    """Columns are (header, lookup) pairs; lookup is ``dim:<id>``, ``metric:<id>`` or ``overall``."""
    header = ["Method"] + [h for h, _ in columns]
    rows = []
    for rep in reports:
        row = [str(rep.get("method", ""))]
        for _, key in columns:
            kind, _, name = key.partition(":")
            if kind == "dim":
                val = rep.get("dimension_means", {}).get(name)
            elif kind == "metric":
                val = rep.get("metric_means", {}).get(name)
            else:
                val = rep.get("overall_mean")
            row.append(format_percent(val))
        rows.append(row)
    return header, rows


def build_tables(reports: Sequence[Mapping[str, Any]]) -> dict[str, tuple[list[str], list[list[str]]]]:
    """Overall, per-dimension breakdowns (temporal, HERD, alignment, static, clarity)."""
    out = {"overall": _table(reports, [(_label(d), f"dim:{d}") for d in DIMENSIONS] + [("Avg.", "overall")])}
    for dim in ("temporal_quality", "herd", "static_quality", "text_video_alignment", "content_clarity"):
        out[dim] = _table(reports, [(_label(m), f"metric:{m}") for m in DIMENSIONS[dim]] + [("Avg.", f"dim:{dim}")])
    return out


def render(header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] + [":---:"] * (len(header) - 1)) + "|"]
        lines += ["| " + " | ".join(r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}; choose from {FORMATS}")


def radar_series(reports: Sequence[Mapping[str, Any]]) -> dict[str, Any]:
    dims = list(DIMENSIONS)
    return {
        "axes": [_label(d) for d in dims],
        "series": [
            {
                "method": rep.get("method", ""),
                "values": [None if rep.get("dimension_means", {}).get(d) is None else 100.0 * rep["dimension_means"][d] for d in dims],
            }
            for rep in reports
        ],
    }


def emit_tables(report_paths: Sequence[str | Path], fmt: str, out_dir: str | Path) -> list[Path]:
    if fmt not in FORMATS:
        raise ValueError(f"unknown table format {fmt!r}; choose from {FORMATS}")
    reports = [load_report(p) for p in report_paths]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "md"
    written = []
    for name, (header, rows) in build_tables(reports).items():
        path = out / f"{name}.{ext}"
        path.write_text(render(header, rows, fmt), encoding="utf-8")
        written.append(path)
    radar = out / "radar.json"
    radar.write_text(json.dumps(radar_series(reports), indent=2) + "\n", encoding="utf-8")
    written.append(radar)
    return written


def emit_correlations(
    report_paths: Sequence[str | Path],
    pairs: Sequence[tuple[str, str]] = DEFAULT_CORRELATION_PAIRS,
    out_dir: str | Path | None = None,
    fmt: str = "csv",
) -> list[dict[str, Any]]:
    """Correlation rows over the pooled samples of all reports; writes a table and scatter JSON."""
    samples: list[ScoreReport] = []
    for p in report_paths:
        samples.extend(ScoreReport.from_json(s) for s in load_report(p).get("samples", []))
    rows = correlation_table(samples, pairs)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        header = ["Metric 1", "Metric 2", "n", "Pearson", "Spearman", "Kendall", "Status"]
        body = [
            [_label(r["metric_1"]), _label(r["metric_2"]), str(r["n"])]
            + ["—" if r[k] is None else f"{r[k]:.4f}" for k in ("pearson", "spearman", "kendall")]
            + [r["status"]]
            for r in rows
        ]
        ext = "csv" if fmt == "csv" else "md"
        (out / f"correlations.{ext}").write_text(render(header, body, fmt), encoding="utf-8")
        (out / "scatter.json").write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    return rows


def parse_pair(text: str) -> tuple[str, str]:
    a, sep, b = text.partition(":")
    if not sep or not a or not b:
        raise ValueError(f"metric pair {text!r} must look like metric_1:metric_2")
    return a.strip(), b.strip()
