"""Roll-ups over sub-dimensions and samples, category grouping, and metric correlations."""

from __future__ import annotations

import math
import warnings
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .core import CATEGORIES, DIMENSIONS, MetricScore, PromptRecord, ScoreReport, Suite, mean

DEFAULT_CORRELATION_PAIRS: tuple[tuple[str, str], ...] = (
    ("static_quality", "text_video_alignment"),
    ("static_quality", "temporal_quality"),
    ("static_quality", "content_clarity"),
    ("static_quality", "herd"),
    ("event_alignment", "intra_event_subject_consistency"),
    ("event_alignment", "intra_event_background_consistency"),
    ("event_alignment", "inter_event_subject_consistency"),
    ("event_alignment", "inter_event_background_consistency"),
)


class GroupingError(ValueError):
    """A sample's theme could not be mapped to a category."""


def aggregate_dimension(sub_scores: Iterable[MetricScore | float]) -> float | None:
    """Unweighted mean of ok sub-scores; None when nothing is ok."""
    vals = [s.normalized if isinstance(s, MetricScore) else float(s) for s in sub_scores if not isinstance(s, MetricScore) or s.ok]
    return mean(vals) if vals else None


def aggregate_overall(dimension_averages: Mapping[str, float | None] | Sequence[float | None]) -> float | None:
    """Mean of the five dimension averages; None if any is missing."""
    vals = list(dimension_averages.get(d) for d in DIMENSIONS) if isinstance(dimension_averages, Mapping) else list(dimension_averages)
    if len(vals) != len(DIMENSIONS) or any(v is None for v in vals):
        return None
    return mean(vals)


def summarize(reports: Sequence[ScoreReport]) -> dict[str, Any]:
    """Method-level means: each metric over samples, each dimension over its metric means."""
    metric_means: dict[str, float | None] = {}
    counts: dict[str, int] = {}
    for subs in DIMENSIONS.values():
        for m in subs:
            vals = [r.metrics[m].normalized for r in reports if m in r.metrics and r.metrics[m].ok]
            metric_means[m] = mean(vals) if vals else None
            counts[m] = len(vals)
    dim_means = {d: aggregate_dimension(metric_means[m] for m in subs if metric_means[m] is not None) for d, subs in DIMENSIONS.items()}
    return {
        "metric_means": metric_means,
        "metric_counts": counts,
        "dimension_means": dim_means,
        "overall_mean": aggregate_overall(dim_means),
        "samples": len(reports),
        "failed_samples": sum(r.error is not None for r in reports),
    }


def group_by_category(
    reports: Sequence[ScoreReport],
    suite: Suite | Sequence[PromptRecord],
    theme_categories: Mapping[str, str] | None = None,
) -> dict[str, dict[str, Any]]:
    """Per-category summaries; categories without samples are omitted.

    A record's own category is used unless ``theme_categories`` maps its
    theme, in which case the mapping wins.
    """
    records = suite.samples if isinstance(suite, Suite) else suite
    by_id = {r.id: r for r in records}
    groups: dict[str, list[ScoreReport]] = {}
    for rep in reports:
        rec = by_id.get(rep.sample_id)
        if rec is None:
            raise GroupingError(f"sample {rep.sample_id!r} not in suite")
        cat = (theme_categories or {}).get(rec.theme, rec.category)
        if cat not in CATEGORIES:
            raise GroupingError(f"theme {rec.theme!r} of sample {rec.id!r} has no category")
        groups.setdefault(cat, []).append(rep)
    return {c: summarize(groups[c]) for c in CATEGORIES if c in groups}


# ------------------------------------------------------------ correlation


def _coefficient(fn: Any, a: np.ndarray, b: np.ndarray) -> float | None:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value = float(fn(a, b)[0])
    return None if math.isnan(value) else value


def correlate(series_a: Sequence[float], series_b: Sequence[float]) -> dict[str, float | None]:
    """Pearson r, Spearman rho (average ranks) and Kendall tau-b; None where undefined."""
    a = np.asarray(series_a, dtype=np.float64)
    b = np.asarray(series_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("series must be one-dimensional and of equal length")
    if a.size < 3:
        raise ValueError("need at least three paired values")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("series must be finite")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return {"pearson": None, "spearman": None, "kendall": None}
    return {
        "pearson": _coefficient(stats.pearsonr, a, b),
        "spearman": _coefficient(stats.spearmanr, a, b),
        "kendall": _coefficient(lambda x, y: stats.kendalltau(x, y, variant="b"), a, b),
    }


def ols_line(x: Sequence[float], y: Sequence[float]) -> dict[str, float] | None:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.size < 2 or np.ptp(xa) == 0:
        return None
    xm, ym = xa.mean(), ya.mean()
    slope = float(np.sum((xa - xm) * (ya - ym)) / np.sum((xa - xm) ** 2))
    return {"slope": slope, "intercept": float(ym - slope * xm)}


def sample_value(report: ScoreReport, name: str) -> float | None:
    """A dimension average or an ok metric value of one sample."""
    if name in DIMENSIONS:
        return report.dimension_averages.get(name)
    score = report.metrics.get(name)
    return score.normalized if score is not None and score.ok else None


def correlation_table(
    reports: Sequence[ScoreReport], pairs: Sequence[tuple[str, str]] = DEFAULT_CORRELATION_PAIRS
) -> list[dict[str, Any]]:
    """One row per metric pair, with scatter points and an OLS line for plotting."""
    rows = []
    for m1, m2 in pairs:
        points = []
        for rep in reports:
            x, y = sample_value(rep, m1), sample_value(rep, m2)
            if x is not None and y is not None:
                points.append((x, y))
        row: dict[str, Any] = {"metric_1": m1, "metric_2": m2, "n": len(points), "pearson": None, "spearman": None, "kendall": None}
        if len(points) < 3:
            row["status"] = "insufficient-samples"
        else:
            xs, ys = zip(*points)
            row.update(correlate(xs, ys))
            row["status"] = "ok" if row["pearson"] is not None else "not_applicable"
            row["line"] = ols_line(xs, ys)
        row["points"] = [list(p) for p in points]
        rows.append(row)
    return rows
