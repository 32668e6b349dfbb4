"""Content clarity from repeated judge trials, and polarity-aware HERD question answering."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .core import CLARITY_DIMENSIONS, HERD_DIMENSIONS, HerdQuestion, MetricScore, PromptRecord, VideoAsset, mean
from .prompting import FormatError, ask_json, ask
from .providers import ExtractionError, ProviderHub, ProviderKind, canonical_answer

ANSWERS = ("yes", "no", "unclear")


class ClarityError(RuntimeError):
    """No clarity trial produced a valid judgment."""


# ---------------------------------------------------------------- clarity


@dataclass(frozen=True)
class ClarityTrial:
    trial_index: int
    scores: Mapping[str, int]
    reasons: Mapping[str, str]

    def __post_init__(self) -> None:
        if set(self.scores) != set(CLARITY_DIMENSIONS):
            raise ValueError(f"trial needs exactly the dimensions {CLARITY_DIMENSIONS}")
        for d, s in self.scores.items():
            if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s <= 4:
                raise ValueError(f"{d}: score {s!r} is not an integer in 0..4")

    def to_json(self) -> dict[str, Any]:
        return {
            "trial_index": self.trial_index,
            "dimensions": {d: {"score": self.scores[d], "reason": self.reasons.get(d, "")} for d in CLARITY_DIMENSIONS},
        }


def _dimension_key(name: str) -> str:
    return re.sub(r"[\s_]+", "-", name.strip().lower())


def parse_clarity(value: Any, trial_index: int) -> ClarityTrial:
    """Validate one judge output: four dimensions, integral scores in 0..4."""
    if not isinstance(value, Mapping):
        raise FormatError("clarity output is not a JSON object")
    entries = {_dimension_key(k): v for k, v in value.items()}
    missing = [d for d in CLARITY_DIMENSIONS if d not in entries]
    if missing:
        raise FormatError(f"missing dimensions {missing}")
    scores: dict[str, int] = {}
    reasons: dict[str, str] = {}
    for d in CLARITY_DIMENSIONS:
        entry = entries[d]
        raw = entry.get("score") if isinstance(entry, Mapping) else entry
        if isinstance(raw, str) and raw.strip().lstrip("-").isdigit():
            raw = int(raw.strip())
        if isinstance(raw, float) and raw.is_integer():
            raw = int(raw)
        if not isinstance(raw, int) or isinstance(raw, bool) or not 0 <= raw <= 4:
            raise FormatError(f"{d}: score {raw!r} is not an integer in 0..4")
        scores[d] = raw
        reasons[d] = str(entry.get("reason", "")) if isinstance(entry, Mapping) else ""
    return ClarityTrial(trial_index, scores, reasons)


def run_clarity_trials(
    video: VideoAsset,
    hub: ProviderHub,
    trials: int = 3,
    *,
    attempts: int = 2,
    examples: Mapping[str, Sequence[str]] | None = None,
    transcript: list[dict[str, Any]] | None = None,
) -> tuple[list[ClarityTrial], dict[str, Any]]:
    """Run ``trials`` independently seeded judgments; invalid ones are retried, then dropped."""
    if trials < 1:
        raise ValueError("need at least one trial")
    valid: list[ClarityTrial] = []
    dropped: list[int] = []
    for r in range(trials):
        log: list[dict[str, Any]] = []
        try:
            valid.append(
                ask_json(
                    hub,
                    ProviderKind.VIDEO_DESCRIBER,
                    "clarity",
                    {},
                    lambda v, r=r: parse_clarity(v, r),
                    video=video,
                    params={"trial": r},
                    attempts=attempts,
                    examples=examples,
                    sample_id=video.sample_id,
                    transcript=log,
                )
            )
        except ExtractionError:
            dropped.append(r)
        if transcript is not None:
            transcript.append({"trial_index": r, "outputs": log})
    diag: dict[str, Any] = {"requested_trials": trials, "valid_trials": len(valid)}
    if dropped:
        diag["dropped_trials"] = dropped
    if not valid:
        raise ClarityError(f"{video.sample_id}: all {trials} clarity trials were invalid")
    return valid, diag


def clarity_score(trials: Sequence[ClarityTrial]) -> tuple[MetricScore, dict[str, MetricScore]]:
    """Per-dimension mean of score/4 over trials, and their mean as the overall clarity."""
    if not trials:
        raise ClarityError("no valid clarity trials")
    per_dim = {}
    for d in CLARITY_DIMENSIONS:
        v = mean(t.scores[d] / 4 for t in trials)
        mid = d.replace("-", "_")
        per_dim[mid] = MetricScore(mid, v, v, diagnostics={"trials": len(trials)})
    overall = mean(s.normalized for s in per_dim.values())
    return MetricScore("content_clarity", overall, overall, diagnostics={"trials": len(trials)}), per_dim


# ------------------------------------------------------------------- HERD


@dataclass(frozen=True)
class HerdResponse:
    question: HerdQuestion
    answer: str
    forced: bool = False

    def __post_init__(self) -> None:
        if self.answer not in ANSWERS:
            raise ValueError(f"answer {self.answer!r} not in {ANSWERS}")

    def to_json(self) -> dict[str, Any]:
        return {**self.question.to_json(), "answer": self.answer, "forced": self.forced}


def _answer(text: str) -> str:
    ans = canonical_answer(text, ANSWERS)
    if ans is None:
        raise FormatError(f"not yes/no/unclear: {text[:80]!r}")
    return ans


def herd_answer(
    record: PromptRecord,
    video: VideoAsset,
    hub: ProviderHub,
    *,
    attempts: int = 2,
    examples: Mapping[str, Sequence[str]] | None = None,
) -> list[HerdResponse]:
    if not record.herd_questions:
        raise ValueError(f"{record.id}: no HERD questions")
    out = []
    for q in record.herd_questions:
        try:
            ans = ask(
                hub,
                ProviderKind.QUESTION_ANSWERER,
                "herd_answer",
                {"question_text": q.text},
                _answer,
                video=video,
                attempts=attempts,
                examples=examples,
                extra={"question": q.text},
                sample_id=video.sample_id,
            )
            out.append(HerdResponse(q, ans))
        except ExtractionError:
            out.append(HerdResponse(q, "unclear", forced=True))
    return out


def is_consistent(response: HerdResponse) -> bool:
    pol = response.question.polarity
    return (response.answer == "yes" and pol == "positive") or (response.answer == "no" and pol == "negative")


def herd_score(responses: Sequence[HerdResponse]) -> tuple[MetricScore, dict[str, MetricScore]]:
    """Share of polarity-consistent answers among yes/no answers, per dimension, then averaged."""
    if not responses:
        raise ValueError("responses must be nonempty")
    per_dim: dict[str, MetricScore] = {}
    for dim in HERD_DIMENSIONS:
        mid = dim.replace("-", "_")
        group = [r for r in responses if r.question.dimension == dim]
        valid = [r for r in group if r.answer != "unclear"]
        if not valid:
            per_dim[mid] = MetricScore.not_applicable(mid, "no valid yes/no answers", questions=len(group))
            continue
        consistent = sum(is_consistent(r) for r in valid)
        v = consistent / len(valid)
        per_dim[mid] = MetricScore(mid, v, v, diagnostics={"consistent": consistent, "valid": len(valid), "questions": len(group)})
    ok = [s.normalized for s in per_dim.values() if s.ok]
    forced = sum(r.forced for r in responses)
    diag: dict[str, Any] = {"questions": len(responses), "valid": sum(r.answer != "unclear" for r in responses)}
    if forced:
        diag["unparseable_answers"] = forced
    if not ok:
        return MetricScore.not_applicable("herd", "every answer was unclear", **diag), per_dim
    v = mean(ok)
    return MetricScore("herd", v, v, diagnostics=diag), per_dim
