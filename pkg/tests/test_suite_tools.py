from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import pytest

import helpers
from lvbench.core import HERD_DIMENSIONS, ComplexityScore, EventSpec
from lvbench.providers import ExtractionError, ProviderKind
from lvbench.suite_tools import (
    GenerationError,
    annotate_polarity,
    build_herd_questions,
    dimension_title,
    evaluation_text,
    extract_dimension_evaluations,
    extract_human_actions,
    generate_herd_questions,
    score_prompt_complexity,
    self_refine_prompt,
    split_event_prompts,
    suite_complexity,
)

EVALS = {d: f"The viewer feels {d.replace('-', ' ')} throughout." for d in HERD_DIMENSIONS}


def complexity_hub(scores):
    return helpers.hub({ProviderKind.COMPLEXITY_JUDGE: ("mock", {"scores": scores})}, retries=0)


# ------------------------------------------------------------- complexity


def test_complexity_average():
    c = score_prompt_complexity("A chef cooks, then a dog runs.", complexity_hub([9, 9, 8]))
    assert (c.semantic, c.structural, c.control) == (9, 9, 8)
    assert round(c.average, 2) == 8.67


@pytest.mark.parametrize("scores", [[11, 5, 5], [0, 5, 5], [5, 5.5, 5]])
def test_complexity_out_of_range_fails(scores):
    with pytest.raises(GenerationError):
        score_prompt_complexity("A prompt.", complexity_hub(scores), attempts=2)


def test_complexity_rejects_empty_prompt():
    with pytest.raises(ValueError):
        score_prompt_complexity("  ", complexity_hub([1, 1, 1]))


def test_suite_complexity_means():
    recs = [dataclasses.replace(helpers.fixture_record(i), complexity=ComplexityScore.from_scores(*s)) for i, s in enumerate([(9, 9, 8), (3, 4, 5)])]
    summary = suite_complexity(recs + [dataclasses.replace(helpers.fixture_record(5), complexity=None)])
    assert summary == pytest.approx({"semantic": 6.0, "structural": 6.5, "control": 6.5, "average": (26 / 3 + 4) / 2, "prompts": 2.0})
    with pytest.raises(ValueError):
        suite_complexity([dataclasses.replace(helpers.fixture_record(0), complexity=None)])


# ---------------------------------------------------------- human actions


def test_no_humans_gives_no_actions():
    assert extract_human_actions("A calm landscape at dusk with rolling hills.", helpers.hub()) == []


def test_chef_action():
    acts = extract_human_actions("A chef chops fresh vegetables quickly. Steam rises.", helpers.hub())
    assert [(a.subject, a.action) for a in acts] == [("chef", "chops fresh vegetables")]


def test_several_people():
    prompt = "A man walks his dog. A woman paints a mural. Later a dancer spins on stage."
    acts = extract_human_actions(prompt, helpers.hub())
    assert [a.subject for a in acts] == ["man", "woman", "dancer"]


def test_action_output_with_empty_field_is_retried_then_fails():
    hub = helpers.hub({ProviderKind.TEXT_LLM: ("mock", {"responses": {"human_action_extraction": [{"subject": "", "action": "runs"}]}})})
    with pytest.raises(ExtractionError):
        extract_human_actions("A man runs.", hub, attempts=2)


# -------------------------------------------------------- HERD questions


def test_evaluation_text_strips_base():
    rec = helpers.fixture_record(0)
    assert evaluation_text(rec) == "The viewer should feel calm and inspired by the gentle pacing."


def test_dimension_extraction_covers_seven():
    evals = extract_dimension_evaluations("Viewers feel joy. The story is clear.", helpers.hub())
    assert list(evals) == list(HERD_DIMENSIONS)


def test_dimension_extraction_missing_dimension_fails():
    partial = {dimension_title(d): "x" for d in HERD_DIMENSIONS[:6]}
    hub = helpers.hub({ProviderKind.TEXT_LLM: ("mock", {"responses": {"herd_dimension_extraction": partial}})})
    with pytest.raises(Exception, match="missing dimensions"):
        extract_dimension_evaluations("text", hub, attempts=1)


def test_generate_42_questions():
    qs, flags = generate_herd_questions(EVALS, helpers.hub())
    assert len(qs) == 42 and flags == []
    for d in HERD_DIMENSIONS:
        texts = [q.text for q in qs if q.dimension == d]
        assert len(texts) == 6 and len(set(texts)) == 6
        assert all(t.endswith("?") for t in texts)


def test_generate_needs_every_dimension():
    with pytest.raises(ValueError):
        generate_herd_questions({d: "x" for d in HERD_DIMENSIONS[:6]}, helpers.hub())


def _question_backend(unique_on_regen: bool):
    calls = []

    def backend(request, params):
        calls.append((params["slot"], params["regen"]))
        tag = f" variant {params['slot']}" if unique_on_regen and params["regen"] else ""
        return json.dumps({dimension_title(d): f"Does the video convey {d}{tag}?" for d in HERD_DIMENSIONS})

    return backend, calls


def test_duplicate_is_regenerated():
    backend, calls = _question_backend(unique_on_regen=True)
    hub = helpers.hub()
    hub.register(ProviderKind.TEXT_LLM, backend)
    qs, flags = generate_herd_questions(EVALS, hub, per_dimension=3)
    assert flags == []
    assert calls == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1)]
    assert len({q.text for q in qs}) == 21


def test_persistent_duplicate_is_flagged():
    backend, _ = _question_backend(unique_on_regen=False)
    hub = helpers.hub()
    hub.register(ProviderKind.TEXT_LLM, backend)
    qs, flags = generate_herd_questions(EVALS, hub, per_dimension=2)
    assert len(qs) == 14
    assert len(flags) == 7 and {f["flag"] for f in flags} == {"duplicate-accepted"}


@pytest.mark.parametrize(
    "reply, label",
    [("positive", "positive"), ("Negative", "negative"), ("Positive.", "positive"), ("  negative!", "negative")],
)
def test_polarity_labels(reply, label):
    hub = helpers.hub({ProviderKind.TEXT_LLM: ("mock", {"responses": {"herd_polarity": reply}})})
    assert annotate_polarity("Does the video feel rushed?", hub) == label


def test_polarity_garbage_fails():
    hub = helpers.hub({ProviderKind.TEXT_LLM: ("mock", {"responses": {"herd_polarity": "neutral"}})})
    with pytest.raises(GenerationError):
        annotate_polarity("Does it?", hub, attempts=2)


def test_mock_polarity_cues():
    hub = helpers.hub()
    assert annotate_polarity("Does the video fail to convey joy?", hub) == "negative"
    assert annotate_polarity("Does the video convey joy?", hub) == "positive"


def test_build_chain_labels_every_question():
    qs, _ = build_herd_questions(helpers.fixture_record(0), helpers.hub())
    assert len(qs) == 42
    assert all(q.polarity in ("positive", "negative") for q in qs)
    for q in qs:
        assert (q.polarity == "negative") == ("fail to convey" in q.text)


# ---------------------------------------------------------- event prompts


def test_split_event_prompts_count_and_subjects():
    events = [EventSpec("A chef chops onions.", "chef"), EventSpec("Rain falls.", ""), EventSpec("A dog barks.", "dog", camera_motion="pan left")]
    subs = split_event_prompts("whole prompt", events, helpers.hub())
    assert len(subs) == 3
    assert subs[0].startswith("chef") and subs[2].startswith("dog") and "pan left" in subs[2]


def test_split_wrong_count_fails():
    hub = helpers.hub({ProviderKind.TEXT_LLM: ("mock", {"responses": {"event_split": ["only one"]}})})
    with pytest.raises(GenerationError):
        split_event_prompts("p", [EventSpec("a", ""), EventSpec("b", "")], hub, attempts=1)
    with pytest.raises(ValueError):
        split_event_prompts("p", [], hub)


# ------------------------------------------------------------ self-refine


def test_self_refine_stops_on_no_issues(tmp_path: Path):
    video = helpers.write_video(tmp_path / "v.npz", helpers.square_video(16))
    out = self_refine_prompt(video, helpers.hub())
    assert out["needs_review"] and len(out["history"]) == 1 and out["prompt"]
