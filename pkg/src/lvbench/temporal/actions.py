"""Human action occurrence and smoothness via binary video QA."""

from __future__ import annotations

from typing import Any

from ..core import ActionSpec, MetricScore, PromptRecord, VideoAsset, mean
from ..prompting import FormatError, ask
from ..providers import ExtractionError, ProviderHub, ProviderKind, canonical_answer

SMOOTHNESS_QUESTIONS = (
    "Was the action continuous without abrupt interruptions?",
    "Did the action appear natural and not stiff?",
    "Did the action maintain fluid transitions from start to finish?",
)


def occurrence_question(action: ActionSpec) -> str:
    return f"Did the {action.subject} {action.action} in the video?"


def _yes_no(text: str) -> str:
    answer = canonical_answer(text)
    if answer is None:
        raise FormatError(f"not a yes/no answer: {text[:80]!r}")
    return answer


def _ask_binary(hub: ProviderHub, video: VideoAsset, template: str, inputs: dict[str, str], question: str, attempts: int) -> tuple[str, bool]:
    """Canonical yes/no answer; unusable output after all attempts counts as "no" (flagged)."""
    try:
        return ask(hub, ProviderKind.QUESTION_ANSWERER, template, inputs, _yes_no, video=video, attempts=attempts, extra={"question": question}, sample_id=video.sample_id), False
    except ExtractionError:
        return "no", True


def human_action_score(record: PromptRecord, video: VideoAsset, hub: ProviderHub, *, attempts: int = 3) -> tuple[MetricScore, list[dict[str, Any]]]:
    """Per action: (occurrence + smoothness yes-count) / 4; metric is the mean over actions."""
    if not record.human_actions:
        return MetricScore.not_applicable("human_action", "prompt has no human actions"), []
    details = []
    scores = []
    for act in record.human_actions:
        q = occurrence_question(act)
        occ, occ_flag = _ask_binary(hub, video, "human_action_detection", {"question_text": q}, q, attempts)
        answers = [{"question": q, "answer": occ, "forced": occ_flag}]
        action_text = f"{act.subject} {act.action}"
        for sq in SMOOTHNESS_QUESTIONS:
            ans, flag = _ask_binary(hub, video, "human_action_smoothness", {"action_text": action_text, "question_text": sq}, f"{action_text} | {sq}", attempts)
            answers.append({"question": sq, "answer": ans, "forced": flag})
        score = sum(a["answer"] == "yes" for a in answers) / 4
        scores.append(score)
        details.append({"subject": act.subject, "action": act.action, "answers": answers, "score": score})
    value = mean(scores)
    diag: dict[str, Any] = {"actions": len(scores)}
    forced = sum(a["forced"] for d in details for a in d["answers"])
    if forced:
        diag["non_binary_answers_counted_as_no"] = forced
    return MetricScore("human_action", value, value, diagnostics=diag), details
