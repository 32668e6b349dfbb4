"""Domain types shared by every metric module.

All records are frozen dataclasses with tuple-valued collections so they can
be passed between worker threads without copying. Scores are always stored on
the [0, 1] scale; percentages only appear when tables are rendered.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

CATEGORIES = ("human-real-life", "nature-exploration", "virtual-entertainment")

HERD_DIMENSIONS = (
    "emotional-response",
    "narrative-flow",
    "character-development",
    "visual-style",
    "themes",
    "interpretive-depth",
    "overall-impression",
)
HERD_QUESTIONS_PER_DIMENSION = 6

CLARITY_DIMENSIONS = (
    "theme-clarity",
    "logical-structure",
    "information-completeness",
    "information-consistency",
)

POLARITIES = ("positive", "negative")

# dimension -> ordered sub-dimension metric ids (26 in total)
DIMENSIONS: dict[str, tuple[str, ...]] = {
    "static_quality": ("aesthetic_quality", "technical_quality"),
    "text_video_alignment": ("overall_alignment", "event_alignment"),
    "temporal_quality": (
        "dynamic_degree",
        "motion_smoothness",
        "warping_error",
        "semantic_consistency",
        "temporal_flickering",
        "transition_smoothness",
        "human_action",
        "intra_event_subject_consistency",
        "intra_event_background_consistency",
        "inter_event_subject_consistency",
        "inter_event_background_consistency",
    ),
    "content_clarity": tuple(d.replace("-", "_") for d in CLARITY_DIMENSIONS),
    "herd": tuple(d.replace("-", "_") for d in HERD_DIMENSIONS),
}
METRIC_TO_DIMENSION = {m: d for d, ms in DIMENSIONS.items() for m in ms}


class Status(str, Enum):
    OK = "ok"
    NOT_APPLICABLE = "not_applicable"
    ERROR = "error"


class RangeError(ValueError):
    """A value fell outside its permitted range."""


@dataclass(frozen=True)
class EventSpec:
    event: str
    subject: str = ""
    setting: str = ""
    action: str = ""
    camera_motion: str = "static"

    def to_json(self) -> dict[str, str]:
        return {
            "event": self.event,
            "subject": self.subject,
            "setting": self.setting,
            "action": self.action,
            "camera motion": self.camera_motion,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> EventSpec:
        camera = data.get("camera motion", data.get("camera_motion"))
        return cls(
            event=str(data.get("event") or ""),
            subject=str(data.get("subject") or ""),
            setting=str(data.get("setting") or ""),
            action=str(data.get("action") or ""),
            camera_motion="static" if camera is None else str(camera),
        )


@dataclass(frozen=True)
class HerdQuestion:
    dimension: str
    text: str
    polarity: str

    def to_json(self) -> dict[str, str]:
        return {"dimension": self.dimension, "text": self.text, "polarity": self.polarity}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> HerdQuestion:
        return cls(str(data["dimension"]), str(data["text"]), str(data.get("polarity", "")))


@dataclass(frozen=True)
class ActionSpec:
    subject: str
    action: str

    def to_json(self) -> dict[str, str]:
        return {"subject": self.subject, "action": self.action}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ActionSpec:
        return cls(str(data.get("subject", "")), str(data.get("action", "")))


@dataclass(frozen=True)
class ComplexityScore:
    semantic: int
    structural: int
    control: int
    average: float

    @classmethod
    def from_scores(cls, semantic: int, structural: int, control: int) -> ComplexityScore:
        return cls(semantic, structural, control, (semantic + structural + control) / 3)

    def to_json(self) -> dict[str, Any]:
        return {
            "semantic": self.semantic,
            "structural": self.structural,
            "control": self.control,
            "average": self.average,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ComplexityScore:
        return cls(
            int(data["semantic"]),
            int(data["structural"]),
            int(data["control"]),
            float(data["average"]),
        )


@dataclass(frozen=True)
class PromptRecord:
    id: str
    theme: str
    category: str
    prompt_text: str
    prompt_base: str
    ground_truth_events: tuple[EventSpec, ...] = ()
    herd_questions: tuple[HerdQuestion, ...] = ()
    human_actions: tuple[ActionSpec, ...] = ()
    complexity: ComplexityScore | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "theme": self.theme,
            "category": self.category,
            "prompt_text": self.prompt_text,
            "prompt_base": self.prompt_base,
            "ground_truth_events": [e.to_json() for e in self.ground_truth_events],
            "herd_questions": [q.to_json() for q in self.herd_questions],
            "human_actions": [a.to_json() for a in self.human_actions],
        }
        if self.complexity is not None:
            out["complexity"] = self.complexity.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> PromptRecord:
        complexity = data.get("complexity")
        return cls(
            id=str(data["id"]),
            theme=str(data.get("theme", "")),
            category=str(data.get("category", "")),
            prompt_text=str(data.get("prompt_text", "")),
            prompt_base=str(data.get("prompt_base", "")),
            ground_truth_events=tuple(
                EventSpec.from_json(e) for e in data.get("ground_truth_events", ())
            ),
            herd_questions=tuple(HerdQuestion.from_json(q) for q in data.get("herd_questions", ())),
            human_actions=tuple(ActionSpec.from_json(a) for a in data.get("human_actions", ())),
            complexity=ComplexityScore.from_json(complexity) if complexity else None,
        )


@dataclass(frozen=True)
class Suite:
    version: str
    samples: tuple[PromptRecord, ...]

    def to_json(self) -> dict[str, Any]:
        return {"version": self.version, "samples": [s.to_json() for s in self.samples]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Suite:
        return cls(
            version=str(data.get("version", "")),
            samples=tuple(PromptRecord.from_json(s) for s in data.get("samples", ())),
        )

    def by_id(self) -> dict[str, PromptRecord]:
        return {s.id: s for s in self.samples}


def load_suite(path: str | Path) -> Suite:
    with open(path, encoding="utf-8") as fh:
        return Suite.from_json(json.load(fh))


def dump_suite(suite: Suite, path: str | Path | None = None) -> str:
    text = json.dumps(suite.to_json(), indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class VideoAsset:
    sample_id: str
    path: str
    fps: float
    frame_count: int

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class MetricScore:
    metric_id: str
    raw: float | None
    normalized: float | None
    status: Status = Status.OK
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status is Status.OK:
            if self.normalized is None or not 0.0 <= self.normalized <= 1.0:
                raise RangeError(f"{self.metric_id}: normalized {self.normalized!r} not in [0, 1]")
        elif self.normalized is not None:
            raise ValueError(f"{self.metric_id}: status {self.status.value} must not carry a value")

    @property
    def ok(self) -> bool:
        return self.status is Status.OK

    @classmethod
    def not_applicable(cls, metric_id: str, reason: str, **diagnostics: Any) -> MetricScore:
        return cls(metric_id, None, None, Status.NOT_APPLICABLE, {"reason": reason, **diagnostics})

    @classmethod
    def error(cls, metric_id: str, message: str, **diagnostics: Any) -> MetricScore:
        return cls(metric_id, None, None, Status.ERROR, {"error": message, **diagnostics})

    def renamed(self, metric_id: str) -> MetricScore:
        return MetricScore(metric_id, self.raw, self.normalized, self.status, self.diagnostics)

    def to_json(self) -> dict[str, Any]:
        return {
            "metric_id": self.metric_id,
            "raw": self.raw,
            "normalized": self.normalized,
            "status": self.status.value,
            "diagnostics": dict(self.diagnostics),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> MetricScore:
        return cls(
            data["metric_id"],
            data.get("raw"),
            data.get("normalized"),
            Status(data.get("status", "ok")),
            dict(data.get("diagnostics") or {}),
        )


def clamp01(x: float) -> float:
    return min(1.0, max(0.0, float(x)))


def mean(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        raise ValueError("mean of empty sequence")
    return math.fsum(vals) / len(vals)


def dimension_averages(metrics: Mapping[str, MetricScore]) -> dict[str, float]:
    """Unweighted mean of ok sub-dimension scores per dimension; dimensions with none are omitted."""
    out = {}
    for dim, subs in DIMENSIONS.items():
        vals = [metrics[m].normalized for m in subs if m in metrics and metrics[m].ok]
        if vals:
            out[dim] = mean(vals)
    return out


def overall_average(dim_avgs: Mapping[str, float]) -> float | None:
    if any(d not in dim_avgs for d in DIMENSIONS):
        return None
    return mean(dim_avgs[d] for d in DIMENSIONS)


@dataclass(frozen=True)
class ScoreReport:
    sample_id: str
    metrics: Mapping[str, MetricScore]
    dimension_averages: Mapping[str, float]
    overall_average: float | None
    error: str | None = None

    @classmethod
    def build(cls, sample_id: str, metrics: Mapping[str, MetricScore]) -> ScoreReport:
        ordered = {m: metrics[m] for m in sorted(metrics, key=_metric_order)}
        dims = dimension_averages(ordered)
        return cls(sample_id, ordered, dims, overall_average(dims))

    @classmethod
    def failed(cls, sample_id: str, message: str) -> ScoreReport:
        return cls(sample_id, {}, {}, None, message)

    def to_json(self) -> dict[str, Any]:
        out = {
            "sample_id": self.sample_id,
            "metrics": {k: v.to_json() for k, v in self.metrics.items()},
            "dimension_averages": dict(self.dimension_averages),
            "overall_average": self.overall_average,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ScoreReport:
        return cls(
            data["sample_id"],
            {k: MetricScore.from_json(v) for k, v in data.get("metrics", {}).items()},
            dict(data.get("dimension_averages", {})),
            data.get("overall_average"),
            data.get("error"),
        )


def _metric_order(metric_id: str) -> tuple[int, str]:
    order = [m for ms in DIMENSIONS.values() for m in ms]
    return (order.index(metric_id), metric_id) if metric_id in order else (len(order), metric_id)


@dataclass(frozen=True)
class SimilarityMatrix:
    rows: int
    cols: int
    values: tuple[tuple[float, ...], ...]

    @classmethod
    def from_rows(cls, values: Iterable[Iterable[float]], cols: int | None = None) -> SimilarityMatrix:
        rows = tuple(tuple(clamp01(v) for v in row) for row in values)
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged similarity matrix")
        return cls(len(rows), ncols, rows)


def normalize_percent(raw: float) -> float:
    """Scale a [0, 1] score to percent; rounding is left to display code."""
    if not 0.0 <= raw <= 1.0:
        raise RangeError(f"score {raw!r} outside [0, 1]")
    return 100.0 * raw


def format_percent(value: float | None) -> str:
    return "—" if value is None else f"{normalize_percent(value):.2f}"


def validate_prompt_record(
    record: PromptRecord,
    *,
    themes: Iterable[str] | None = None,
    questions_per_dimension: int = HERD_QUESTIONS_PER_DIMENSION,
) -> list[str]:
    """Return human-readable invariant violations; an empty list means the record is valid."""
    problems: list[str] = []
    if not record.id.strip():
        problems.append("id: must be nonempty")
    if not record.prompt_base.strip():
        problems.append("prompt_base: must be nonempty")
    if record.category not in CATEGORIES:
        problems.append(f"category: {record.category!r} not in {{{','.join(CATEGORIES)}}}")
    if themes is not None and record.theme not in set(themes):
        problems.append(f"theme: {record.theme!r} not in configured theme list")

    for i, ev in enumerate(record.ground_truth_events):
        if not ev.event.strip():
            problems.append(f"ground_truth_events[{i}].event: must be nonempty")

    for i, act in enumerate(record.human_actions):
        if not act.subject.strip() or not act.action.strip():
            problems.append(f"human_actions[{i}]: subject and action must be nonempty")

    if record.herd_questions:
        for i, q in enumerate(record.herd_questions):
            if q.polarity not in POLARITIES:
                problems.append(f"herd_questions[{i}].polarity: not in {{positive,negative}}")
            if not q.text.rstrip().endswith("?"):
                problems.append(f"herd_questions[{i}].text: must end with '?'")
            if q.dimension not in HERD_DIMENSIONS:
                problems.append(f"herd_questions[{i}].dimension: unknown dimension {q.dimension!r}")
        counts: dict[str, int] = {}
        for q in record.herd_questions:
            counts[q.dimension] = counts.get(q.dimension, 0) + 1
        if len(counts) != len(HERD_DIMENSIONS):
            problems.append(
                f"herd_questions: expected {len(HERD_DIMENSIONS)} dimensions, found {len(counts)}"
            )
        for dim, n in counts.items():
            if dim in HERD_DIMENSIONS and n != questions_per_dimension:
                problems.append(
                    f"herd_questions[{dim}]: expected {questions_per_dimension} questions, found {n}"
                )

    c = record.complexity
    if c is not None:
        for name in ("semantic", "structural", "control"):
            v = getattr(c, name)
            if not isinstance(v, int) or not 1 <= v <= 10:
                problems.append(f"complexity.{name}: {v!r} not an integer in 1..10")
        if abs(c.average - (c.semantic + c.structural + c.control) / 3) > 1e-9:
            problems.append("complexity.average: not the mean of the three scores")
    return problems


def validate_suite(suite: Suite, **kwargs: Any) -> dict[str, list[str]]:
    """Per-sample violations plus suite-level id uniqueness (reported under key '')."""
    out: dict[str, list[str]] = {}
    seen: set[str] = set()
    for rec in suite.samples:
        probs = validate_prompt_record(rec, **kwargs)
        if rec.id in seen:
            probs.append("id: duplicate within suite")
        seen.add(rec.id)
        if probs:
            out[rec.id] = probs
    return out
