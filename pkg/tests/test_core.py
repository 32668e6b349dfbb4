from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helpers
from lvbench.core import (
    CATEGORIES,
    DIMENSIONS,
    HERD_DIMENSIONS,
    ActionSpec,
    ComplexityScore,
    EventSpec,
    HerdQuestion,
    MetricScore,
    PromptRecord,
    RangeError,
    ScoreReport,
    SimilarityMatrix,
    Status,
    Suite,
    dump_suite,
    format_percent,
    load_suite,
    normalize_percent,
    validate_prompt_record,
    validate_suite,
)
from published_tables import TEMPORAL


def test_well_formed_record_has_no_violations():
    assert validate_prompt_record(helpers.fixture_record(0)) == []


def test_bad_polarity_is_reported_by_index():
    rec = helpers.fixture_record(0)
    qs = list(rec.herd_questions)
    qs[3] = dataclasses.replace(qs[3], polarity="maybe")
    problems = validate_prompt_record(dataclasses.replace(rec, herd_questions=tuple(qs)))
    assert problems == ["herd_questions[3].polarity: not in {positive,negative}"]


def test_five_dimensions_is_one_violation():
    rec = helpers.fixture_record(0, herd_questions=helpers.herd_questions(dimension_count=5))
    assert validate_prompt_record(rec) == ["herd_questions: expected 7 dimensions, found 5"]


def test_question_count_per_dimension_is_configurable():
    rec = helpers.fixture_record(0, herd_questions=helpers.herd_questions(per_dimension=4))
    assert validate_prompt_record(rec, questions_per_dimension=4) == []
    assert len(validate_prompt_record(rec)) == len(HERD_DIMENSIONS)


def test_other_record_rules():
    rec = helpers.fixture_record(0, id=" ", prompt_base="", category="space", theme="odd")
    problems = validate_prompt_record(rec, themes=["travel"])
    assert "id: must be nonempty" in problems
    assert "prompt_base: must be nonempty" in problems
    assert any(p.startswith("category:") for p in problems)
    assert any(p.startswith("theme:") for p in problems)


def test_complexity_range_and_average():
    rec = helpers.fixture_record(0, complexity=ComplexityScore(9, 9, 11, 29 / 3))
    assert validate_prompt_record(rec) == ["complexity.control: 11 not an integer in 1..10"]
    assert ComplexityScore.from_scores(9, 9, 8).average == pytest.approx(26 / 3)


def test_duplicate_ids_in_suite():
    rec = helpers.fixture_record(0)
    assert validate_suite(Suite("v", (rec, rec))) == {"s0": ["id: duplicate within suite"]}


@pytest.mark.parametrize("raw, pct", [(0.5523, 55.23), (0.0, 0.0), (1.0, 100.0)])
def test_normalize_percent(raw, pct):
    assert normalize_percent(raw) == pytest.approx(pct, abs=1e-9)


def test_normalize_percent_rejects_out_of_range():
    with pytest.raises(RangeError):
        normalize_percent(1.2)
    assert format_percent(None) == "—"
    assert format_percent(0.73256) == "73.26"


def test_metric_score_status_rules():
    with pytest.raises(RangeError):
        MetricScore("m", 1.5, 1.5)
    with pytest.raises(ValueError):
        MetricScore("m", None, 0.5, Status.NOT_APPLICABLE)
    na = MetricScore.not_applicable("m", "nothing to score")
    assert na.normalized is None and not na.ok
    assert MetricScore.from_json(na.to_json()) == na


def test_report_averages_skip_non_ok():
    metrics = {
        "aesthetic_quality": MetricScore("aesthetic_quality", 0.5, 0.5),
        "technical_quality": MetricScore.error("technical_quality", "boom"),
        "human_action": MetricScore.not_applicable("human_action", "no humans"),
        "dynamic_degree": MetricScore("dynamic_degree", 1.0, 1.0),
    }
    rep = ScoreReport.build("x", metrics)
    assert rep.dimension_averages == {"static_quality": 0.5, "temporal_quality": 1.0}
    assert rep.overall_average is None
    assert list(rep.metrics) == ["aesthetic_quality", "technical_quality", "dynamic_degree", "human_action"]


def test_temporal_row_average_reproduces_overall_cell():
    row = TEMPORAL["FreeNoise"]
    assert abs(sum(row[:11]) / 11 - 73.26) <= 0.005


def test_similarity_matrix_clamps_and_checks_shape():
    m = SimilarityMatrix.from_rows([[1.2, -0.1]])
    assert m.values == ((1.0, 0.0),)
    assert SimilarityMatrix.from_rows([], cols=3).rows == 0
    with pytest.raises(ValueError):
        SimilarityMatrix.from_rows([[0.1], [0.1, 0.2]])


# ------------------------------------------------------------------ properties

text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=30)
events = st.builds(EventSpec, text, text, text, text, text)
questions = st.builds(HerdQuestion, st.sampled_from(HERD_DIMENSIONS), text, st.sampled_from(["positive", "negative"]))
actions = st.builds(ActionSpec, text, text)
complexity = st.builds(ComplexityScore.from_scores, st.integers(1, 10), st.integers(1, 10), st.integers(1, 10))
records = st.builds(
    PromptRecord,
    id=text,
    theme=text,
    category=st.sampled_from(CATEGORIES),
    prompt_text=text,
    prompt_base=text,
    ground_truth_events=st.lists(events, max_size=4).map(tuple),
    herd_questions=st.lists(questions, max_size=6).map(tuple),
    human_actions=st.lists(actions, max_size=3).map(tuple),
    complexity=st.none() | complexity,
)


@settings(max_examples=80, deadline=None)
@given(st.lists(records, max_size=4))
def test_suite_round_trip(tmp_path_factory, recs):
    suite = Suite("v1", tuple(recs))
    path = tmp_path_factory.mktemp("suite") / "suite.json"
    dump_suite(suite, path)
    assert load_suite(path) == suite


@settings(max_examples=80, deadline=None)
@given(st.dictionaries(st.sampled_from([m for ms in DIMENSIONS.values() for m in ms]), st.floats(0, 1) | st.none()))
def test_dimension_averages_recompute(values):
    metrics = {
        m: MetricScore(m, v, v) if v is not None else MetricScore.not_applicable(m, "n/a") for m, v in values.items()
    }
    rep = ScoreReport.from_json(ScoreReport.build("s", metrics).to_json())
    for dim, subs in DIMENSIONS.items():
        vals = [values[m] for m in subs if values.get(m) is not None]
        if vals:
            assert rep.dimension_averages[dim] == pytest.approx(sum(vals) / len(vals), abs=1e-9)
        else:
            assert dim not in rep.dimension_averages
