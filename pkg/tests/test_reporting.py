from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from lvbench.core import DIMENSIONS, MetricScore, ScoreReport
from lvbench.reporting import build_tables, emit_correlations, emit_tables, parse_pair, radar_series, render


def method_report(name: str, value: float | None, **metric_overrides: float | None) -> dict:
    metric_means = {m: value for subs in DIMENSIONS.values() for m in subs}
    metric_means.update(metric_overrides)
    dims = {d: value for d in DIMENSIONS}
    return {"method": name, "metric_means": metric_means, "dimension_means": dims, "overall_mean": value, "samples": []}


def test_overall_table_percent_cells():
    header, rows = build_tables([method_report("A", 0.641549)])["overall"]
    assert header == ["Method", "Static Quality", "Text-Video Alignment", "Temporal Quality", "Content Clarity", "HERD", "Avg."]
    assert rows == [["A"] + ["64.15"] * 6]


def test_missing_values_render_as_dash():
    _, rows = build_tables([method_report("B", 0.5, human_action=None)])["temporal_quality"]
    assert rows[0][7] == "—"
    assert rows[0][1] == "50.00"


def test_breakdown_tables_cover_every_metric():
    tables = build_tables([method_report("A", 0.5), method_report("B", 0.25)])
    assert set(tables) == {"overall", *DIMENSIONS}
    for dim, subs in DIMENSIONS.items():
        header, rows = tables[dim]
        assert len(header) == len(subs) + 2 and len(rows) == 2


def test_render_markdown_and_csv():
    header, rows = ["Method", "X"], [["A", "12.50"]]
    assert render(header, rows, "markdown") == "| Method | X |\n|---|:---:|\n| A | 12.50 |\n"
    assert render(header, rows, "csv") == "Method,X\nA,12.50\n"
    with pytest.raises(ValueError):
        render(header, rows, "html")


def test_radar_series():
    radar = radar_series([method_report("A", 0.5)])
    assert len(radar["axes"]) == 5 and radar["series"][0]["values"] == [50.0] * 5


def test_emit_tables(tmp_path: Path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps(method_report("A", 0.5)))
    written = emit_tables([path], "csv", tmp_path / "out")
    assert {p.name for p in written} == {"overall.csv", "radar.json", *(f"{d}.csv" for d in DIMENSIONS)}
    rows = list(csv.reader((tmp_path / "out" / "overall.csv").open()))
    assert rows[1] == ["A"] + ["50.00"] * 6
    with pytest.raises(ValueError):
        emit_tables([path], "xml", tmp_path / "x")


def _report_file(tmp_path: Path, name: str, values: list[float]) -> Path:
    samples = []
    for i, v in enumerate(values):
        metrics = {m: MetricScore(m, v, v) for subs in DIMENSIONS.values() for m in subs}
        metrics["aesthetic_quality"] = MetricScore("aesthetic_quality", 0.5, 0.5)
        samples.append(ScoreReport.build(f"{name}{i}", metrics).to_json())
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps({"method": name, "samples": samples}))
    return path


def test_default_correlations(tmp_path: Path):
    a = _report_file(tmp_path, "a", [0.1, 0.4, 0.2])
    b = _report_file(tmp_path, "b", [0.9, 0.3])
    rows = emit_correlations([a, b], out_dir=tmp_path / "out")
    assert len(rows) == 8
    assert all(r["n"] == 5 for r in rows)
    by_pair = {(r["metric_1"], r["metric_2"]): r for r in rows}
    # every dimension and event metric moves together across samples
    assert by_pair[("event_alignment", "intra_event_subject_consistency")]["pearson"] == pytest.approx(1.0)
    text = (tmp_path / "out" / "correlations.csv").read_text()
    assert text.splitlines()[0] == "Metric 1,Metric 2,n,Pearson,Spearman,Kendall,Status"
    assert len(json.loads((tmp_path / "out" / "scatter.json").read_text())[0]["points"]) == 5


def test_constant_column_is_not_applicable(tmp_path: Path):
    a = _report_file(tmp_path, "a", [0.1, 0.4, 0.2, 0.8])
    (row,) = emit_correlations([a], [("aesthetic_quality", "event_alignment")], tmp_path / "out", "markdown")
    assert row["status"] == "not_applicable" and row["pearson"] is None
    assert "| Aesthetic Quality | Event Alignment | 4 | — | — | — | not_applicable |" in (tmp_path / "out" / "correlations.md").read_text()


def test_self_pair(tmp_path: Path):
    a = _report_file(tmp_path, "a", [0.1, 0.4, 0.2, 0.8])
    (row,) = emit_correlations([a], [("event_alignment", "event_alignment")])
    assert (row["pearson"], row["spearman"], row["kendall"]) == pytest.approx((1.0, 1.0, 1.0))


def test_parse_pair():
    assert parse_pair("herd: static_quality") == ("herd", "static_quality")
    with pytest.raises(ValueError):
        parse_pair("herd")
