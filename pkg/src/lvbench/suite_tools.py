"""LLM pipelines that build or augment prompt records before evaluation."""

from __future__ import annotations

import dataclasses
import json
import logging
import re
from typing import Any, Mapping, Sequence

from .alignment import check_paragraph, extract_events
from .core import (
    HERD_DIMENSIONS,
    HERD_QUESTIONS_PER_DIMENSION,
    ActionSpec,
    ComplexityScore,
    EventSpec,
    HerdQuestion,
    PromptRecord,
    VideoAsset,
    mean,
)
from .prompting import FormatError, ask, ask_json
from .providers import ExtractionError, ProviderHub, ProviderKind, canonical_answer

logger = logging.getLogger(__name__)

_COMPLEXITY_KEYS = {"semantic": "semantic_complexity", "structural": "structural_complexity", "control": "control_complexity"}


class GenerationError(RuntimeError):
    """A suite pipeline could not obtain valid model output."""


def dimension_title(dim: str) -> str:
    return dim.replace("-", " ").title()


def dimension_key(name: str) -> str:
    return re.sub(r"[\s_]+", "-", name.strip().lower())


# ------------------------------------------------------------- complexity


def _check_complexity(value: Any) -> ComplexityScore:
    if not isinstance(value, Mapping):
        raise FormatError("complexity output is not an object")
    scores = {}
    for short, key in _COMPLEXITY_KEYS.items():
        entry = value.get(key, value.get(short))
        raw = entry.get("score") if isinstance(entry, Mapping) else entry
        if isinstance(raw, float) and raw.is_integer():
            raw = int(raw)
        if not isinstance(raw, int) or isinstance(raw, bool) or not 1 <= raw <= 10:
            raise FormatError(f"{key}: score {raw!r} is not an integer in 1..10")
        scores[short] = raw
    return ComplexityScore.from_scores(scores["semantic"], scores["structural"], scores["control"])


def score_prompt_complexity(
    prompt: str, hub: ProviderHub, *, attempts: int = 3, examples: Mapping[str, Sequence[str]] | None = None
) -> ComplexityScore:
    if not prompt.strip():
        raise ValueError("prompt must be nonempty")
    try:
        return ask_json(hub, ProviderKind.COMPLEXITY_JUDGE, "complexity", {"prompt_text": prompt}, _check_complexity, attempts=attempts, examples=examples)
    except ExtractionError as exc:
        raise GenerationError(f"complexity judging failed: {exc}") from exc


def suite_complexity(records: Sequence[PromptRecord]) -> dict[str, float]:
    """Benchmark-level means of each complexity axis and of the per-prompt averages."""
    scored = [r.complexity for r in records if r.complexity is not None]
    if not scored:
        raise ValueError("no record carries a complexity score")
    return {
        "semantic": mean(c.semantic for c in scored),
        "structural": mean(c.structural for c in scored),
        "control": mean(c.control for c in scored),
        "average": mean(c.average for c in scored),
        "prompts": float(len(scored)),
    }


# ---------------------------------------------------------- human actions


def _check_actions(value: Any) -> list[ActionSpec]:
    if not isinstance(value, list):
        raise FormatError("expected a JSON list of actions")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, Mapping):
            raise FormatError(f"action {i} is not an object")
        act = ActionSpec(str(item.get("subject", "")).strip(), str(item.get("action", "")).strip())
        if not act.subject or not act.action:
            raise FormatError(f"action {i} has an empty field")
        out.append(act)
    return out


def extract_human_actions(
    prompt: str, hub: ProviderHub, *, attempts: int = 3, examples: Mapping[str, Sequence[str]] | None = None
) -> list[ActionSpec]:
    if not prompt.strip():
        raise ValueError("prompt must be nonempty")
    return ask_json(hub, ProviderKind.TEXT_LLM, "human_action_extraction", {"prompt_text": prompt}, _check_actions, attempts=attempts, examples=examples)


# -------------------------------------------------------- HERD questions


def evaluation_text(record: PromptRecord) -> str:
    """The viewer-expectation part of a test prompt: prompt_text minus the prompt base."""
    text = record.prompt_text.replace(record.prompt_base, "").strip()
    return text or record.prompt_text


def _check_dimension_map(value: Any) -> dict[str, str]:
    if not isinstance(value, Mapping):
        raise FormatError("expected a JSON object keyed by dimension")
    found = {dimension_key(k): str(v) for k, v in value.items()}
    missing = [d for d in HERD_DIMENSIONS if d not in found]
    if missing:
        raise FormatError(f"missing dimensions {missing}")
    return {d: found[d] for d in HERD_DIMENSIONS}


def extract_dimension_evaluations(text: str, hub: ProviderHub, *, attempts: int = 3) -> dict[str, str]:
    """Split a free-form viewer reaction into the seven HERD dimensions."""
    return ask_json(hub, ProviderKind.TEXT_LLM, "herd_dimension_extraction", {"evaluation_text": text}, _check_dimension_map, attempts=attempts)


def _check_questions(value: Any) -> dict[str, str]:
    qs = _check_dimension_map(value)
    for d, q in qs.items():
        q = q.strip()
        if not q.endswith("?"):
            raise FormatError(f"{d}: question does not end with '?': {q!r}")
        qs[d] = q
    return qs


def generate_herd_questions(
    dimension_evaluations: Mapping[str, str],
    hub: ProviderHub,
    *,
    per_dimension: int = HERD_QUESTIONS_PER_DIMENSION,
    attempts: int = 3,
) -> tuple[list[HerdQuestion], list[dict[str, Any]]]:
    """``per_dimension`` questions for each of the seven dimensions, polarity left blank.

    The template yields one question per dimension, so it is sampled once per
    slot (the slot index varies the request). A question that repeats an
    earlier one in its dimension is regenerated once; a second duplicate is
    kept and reported in the returned flags.
    """
    evals = {dimension_key(k): v for k, v in dimension_evaluations.items()}
    missing = [d for d in HERD_DIMENSIONS if d not in evals]
    if missing:
        raise ValueError(f"dimension evaluations missing {missing}")
    payload = json.dumps({dimension_title(d): evals[d] for d in HERD_DIMENSIONS}, indent=2, ensure_ascii=False)

    def sample(slot: int, regen: int) -> dict[str, str]:
        try:
            return ask_json(
                hub,
                ProviderKind.TEXT_LLM,
                "herd_question_generation",
                {"evaluation_text": payload},
                _check_questions,
                params={"slot": slot, "regen": regen},
                attempts=attempts,
            )
        except ExtractionError as exc:
            raise GenerationError(f"HERD question generation failed at slot {slot}: {exc}") from exc

    collected: dict[str, list[str]] = {d: [] for d in HERD_DIMENSIONS}
    flags: list[dict[str, Any]] = []
    for slot in range(per_dimension):
        batch = sample(slot, 0)
        retry: dict[str, str] | None = None
        for d in HERD_DIMENSIONS:
            q = batch[d]
            if _norm(q) in {_norm(x) for x in collected[d]}:
                retry = retry or sample(slot, 1)
                q = retry[d]
                if _norm(q) in {_norm(x) for x in collected[d]}:
                    flags.append({"dimension": d, "slot": slot, "question": q, "flag": "duplicate-accepted"})
            collected[d].append(q)
    questions = [HerdQuestion(d, q, "") for d in HERD_DIMENSIONS for q in collected[d]]
    return questions, flags


def _norm(text: str) -> str:
    return re.sub(r"\W+", " ", text.lower()).strip()


def annotate_polarity(question: str, hub: ProviderHub, *, attempts: int = 3) -> str:
    if not question.strip():
        raise ValueError("question must be nonempty")

    def parse(text: str) -> str:
        pol = canonical_answer(text, ("positive", "negative"))
        if pol is None:
            raise FormatError(f"not a polarity label: {text[:80]!r}")
        return pol

    try:
        return ask(hub, ProviderKind.TEXT_LLM, "herd_polarity", {"question_text": question}, parse, attempts=attempts)
    except ExtractionError as exc:
        raise GenerationError(f"polarity annotation failed: {exc}") from exc


def build_herd_questions(record: PromptRecord, hub: ProviderHub, *, per_dimension: int = HERD_QUESTIONS_PER_DIMENSION) -> tuple[list[HerdQuestion], list[dict[str, Any]]]:
    """Full chain for one record: dimension extraction, question generation, polarity."""
    evals = extract_dimension_evaluations(evaluation_text(record), hub)
    questions, flags = generate_herd_questions(evals, hub, per_dimension=per_dimension)
    return [dataclasses.replace(q, polarity=annotate_polarity(q.text, hub)) for q in questions], flags


# ---------------------------------------------------------- event prompts


def split_event_prompts(prompt: str, events: Sequence[EventSpec], hub: ProviderHub, *, attempts: int = 3) -> list[str]:
    """One generation prompt per event, in event order."""
    if not events:
        raise ValueError("events must be nonempty")

    def check(value: Any) -> list[str]:
        if not isinstance(value, list) or not all(isinstance(v, str) and v.strip() for v in value):
            raise FormatError("expected a JSON array of nonempty strings")
        if len(value) != len(events):
            raise FormatError(f"expected {len(events)} sub-prompts, got {len(value)}")
        return [v.strip() for v in value]

    events_json = json.dumps([e.to_json() for e in events], indent=2, ensure_ascii=False)
    try:
        return ask_json(hub, ProviderKind.TEXT_LLM, "event_split", {"prompt_text": prompt, "events_json": events_json}, check, attempts=attempts)
    except ExtractionError as exc:
        raise GenerationError(f"event split failed: {exc}") from exc


def ground_truth_events(record: PromptRecord, hub: ProviderHub, **kwargs: Any) -> list[EventSpec]:
    return extract_events(record.prompt_base, hub, sample_id=record.id, **kwargs)


# ------------------------------------------------------------ self-refine


def self_refine_prompt(video: VideoAsset, hub: ProviderHub, *, iterations: int = 2) -> dict[str, Any]:
    """Draft a prompt from a source video, then critique and revise it ``iterations`` times.

    The result is a draft for human review, never a finished suite entry.
    """
    kind = ProviderKind.VIDEO_DESCRIBER
    draft = ask(hub, kind, "prompt_draft", {}, check_paragraph, video=video, sample_id=video.sample_id)
    history: list[dict[str, str]] = []
    for i in range(iterations):
        feedback = ask(hub, kind, "self_refine_critique", {"draft_text": draft}, str.strip, video=video, params={"round": i}, sample_id=video.sample_id)
        history.append({"draft": draft, "feedback": feedback})
        if feedback.strip().upper().startswith("NO ISSUES"):
            break
        draft = ask(
            hub,
            kind,
            "self_refine_revise",
            {"draft_text": draft, "feedback_text": feedback},
            check_paragraph,
            video=video,
            params={"round": i},
            sample_id=video.sample_id,
        )
    return {"prompt": draft, "history": history, "needs_review": True}
