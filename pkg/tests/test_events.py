from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helpers
from lvbench.core import EventSpec, Status
from lvbench.providers import ProviderKind, TransientProviderError
from lvbench.temporal import (
    EventClip,
    SubjectTrack,
    TrackSet,
    ground_event_clips,
    inter_event_consistency,
    intra_event_consistency,
    segment_tracks,
    subject_labels,
)
from lvbench.temporal.events import uniform_partition

H, W = helpers.H, helpers.W
RED, BLUE = (220, 40, 40), (40, 40, 220)


def events(n: int, subject: str = "") -> list[EventSpec]:
    return [EventSpec(f"Event number {i}.", subject) for i in range(n)]


# ------------------------------------------------------------------ clips


def test_grounder_spans_are_used(tmp_path: Path):
    video = helpers.write_video(tmp_path / "v.npz", helpers.square_video(n=80), fps=8)
    evs = events(2)
    hub = helpers.hub({ProviderKind.TEMPORAL_GROUNDER: ("mock", {"spans": {evs[0].event: [0.0, 4.0], evs[1].event: [4.5, 9.9]}})})
    clips = ground_event_clips(video, evs, hub)
    assert [(c.start_frame, c.end_frame, c.source, c.clamped) for c in clips] == [(0, 32, "grounded", False), (36, 80, "grounded", False)]


def test_grounder_failure_falls_back_to_uniform(tmp_path: Path):
    video = helpers.write_video(tmp_path / "v.npz", helpers.square_video(n=100))
    hub = helpers.hub(retries=0)

    def broken(request, params):
        raise TransientProviderError("down")

    hub.register(ProviderKind.TEMPORAL_GROUNDER, broken)
    clips = ground_event_clips(video, events(4), hub)
    assert [(c.start_frame, c.end_frame) for c in clips] == [(0, 25), (25, 50), (50, 75), (75, 100)]
    assert {c.source for c in clips} == {"fallback-uniform"}


def test_span_past_the_end_is_clamped(tmp_path: Path):
    video = helpers.write_video(tmp_path / "v.npz", helpers.square_video(n=40), fps=8)
    evs = events(1)
    hub = helpers.hub({ProviderKind.TEMPORAL_GROUNDER: ("mock", {"spans": {evs[0].event: [2.0, 60.0]}})})
    (clip,) = ground_event_clips(video, evs, hub)
    assert (clip.start_frame, clip.end_frame, clip.clamped) == (16, 40, True)


def test_span_entirely_outside_uses_fallback(tmp_path: Path):
    video = helpers.write_video(tmp_path / "v.npz", helpers.square_video(n=40), fps=8)
    evs = events(2)
    hub = helpers.hub({ProviderKind.TEMPORAL_GROUNDER: ("mock", {"spans": {evs[1].event: [50.0, 60.0]}})})
    clips = ground_event_clips(video, evs, hub)
    assert clips[1].source == "fallback-uniform" and (clips[1].start_frame, clips[1].end_frame) == (20, 40)


def test_clip_json_round_trip():
    clip = EventClip(2, 5, 9, "grounded", True)
    assert EventClip.from_json(clip.to_json()) == clip
    with pytest.raises(ValueError):
        EventClip(0, 4, 4)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 2000), st.integers(1, 20))
def test_uniform_partition_covers_video(n, parts):
    bounds = uniform_partition(n, parts)
    assert bounds[0][0] == 0 and bounds[-1][1] == n
    assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))
    assert max(e - s for s, e in bounds) - min(e - s for s, e in bounds) <= 1


# ------------------------------------------------------------------ labels


@pytest.mark.parametrize(
    "subject, labels",
    [("", []), ("Chef", ["chef"]), ("a man and a dog", ["a man", "a dog"]), ("cat, dog; bird & fish", ["cat", "dog", "bird", "fish"]), ("dog and dog", ["dog"])],
)
def test_subject_labels(subject, labels):
    assert subject_labels(subject) == labels


# ------------------------------------------------------------------ tracks


def two_subject_frames(n: int = 8) -> tuple[np.ndarray, np.ndarray]:
    frames = np.full((n, H, W, 3), 90, np.uint8)
    ref = np.zeros((H, W), bool)
    frames[:, 8:20, 6:18] = RED
    frames[:, 26:40, 36:56] = BLUE
    ref[8:20, 6:18] = True
    ref[26:40, 36:56] = True
    return frames, ref


def color_segmenter(recorded: list):
    colors = {"man": RED, "dog": BLUE}

    def segment(request, params):
        target = np.array(colors[request["text"]])
        mask = np.abs(request["image"].astype(int) - target).max(axis=-1) < 30
        recorded.append((request["text"], mask))
        return mask if mask.any() else None

    return segment


def test_two_subjects_give_disjoint_tracks(tmp_path: Path):
    frames, ref = two_subject_frames()
    video = helpers.write_video(tmp_path / "v.npz", frames)
    hub = helpers.hub()
    recorded: list = []
    hub.register(ProviderKind.SEGMENTER, color_segmenter(recorded))
    clips = [EventClip(0, 0, 8)]
    tracks = segment_tracks(video, clips, [EventSpec("A man and a dog play.", "man and dog")], hub, dilate_px=0)
    assert sorted(tracks.subjects) == ["dog", "man"]
    assert {lab for lab, _ in recorded} == {"man", "dog"}
    masks = {lab: m for lab, m in recorded}
    assert not (masks["man"] & masks["dog"]).any()
    union = masks["man"] | masks["dog"]
    iou = (union & ref).sum() / (union | ref).sum()
    assert iou >= 0.9
    assert len(tracks.subjects["man"].features) == 8
    bg_cov = next(iter(tracks.background.coverage.values()))
    assert bg_cov == pytest.approx(1 - ref.mean())


def test_identical_frames_identical_features(tmp_path: Path):
    frames, _ = two_subject_frames()
    video = helpers.write_video(tmp_path / "v.npz", frames)
    hub = helpers.hub()
    hub.register(ProviderKind.SEGMENTER, color_segmenter([]))
    tracks = segment_tracks(video, [EventClip(0, 0, 8)], [EventSpec("x", "man")], hub)
    feats = list(tracks.subjects["man"].features.values())
    assert all(np.array_equal(feats[0], f) for f in feats)
    assert intra_event_consistency(tracks.subjects, [EventClip(0, 0, 8)]).normalized == pytest.approx(1.0)


def test_absent_subject_gives_no_track(tmp_path: Path):
    frames, _ = two_subject_frames()
    video = helpers.write_video(tmp_path / "v.npz", frames)
    hub = helpers.hub({ProviderKind.SEGMENTER: ("mock", {"absent": ["ghost"]})})
    tracks = segment_tracks(video, [EventClip(0, 0, 8)], [EventSpec("x", "ghost")], hub)
    assert tracks.subjects == {}
    assert len(tracks.background.features) == 8
    assert intra_event_consistency(tracks.subjects, [EventClip(0, 0, 8)]).status is Status.NOT_APPLICABLE


def test_segmenter_failures_skip_frames(tmp_path: Path):
    frames, _ = two_subject_frames()
    video = helpers.write_video(tmp_path / "v.npz", frames)
    hub = helpers.hub(retries=0)

    def broken(request, params):
        raise TransientProviderError("oom")

    hub.register(ProviderKind.SEGMENTER, broken)
    tracks = segment_tracks(video, [EventClip(0, 0, 4)], [EventSpec("x", "man")], hub)
    assert len(tracks.skipped_frames) == 4 and not tracks.background.features


def test_track_store_round_trip(tmp_path: Path):
    rng = np.random.default_rng(1)
    subjects = {}
    for label in ("man", "dog"):
        t = SubjectTrack(label)
        for e in range(2):
            for f in range(3):
                t.add(e, 10 * e + f, rng.normal(size=7), coverage=0.1 * f)
        subjects[label] = t
    bg = SubjectTrack("background")
    bg.add(0, 0, rng.normal(size=7), 0.9)
    original = TrackSet(subjects, bg, [{"event_index": 1, "frame_index": 4, "error": "x"}])
    original.save(tmp_path / "tracks")
    loaded = TrackSet.load(tmp_path / "tracks")
    assert sorted(loaded.subjects) == ["dog", "man"]
    for label, track in original.subjects.items():
        other = loaded.subjects[label]
        assert other.features.keys() == track.features.keys()
        for key, v in track.features.items():
            assert np.array_equal(other.features[key], v)
        assert other.coverage == track.coverage
    assert loaded.skipped_frames == original.skipped_frames
    assert (tmp_path / "tracks" / "tracks.bin").stat().st_size == 8 * 7 * 13


def test_zero_feature_is_rejected():
    with pytest.raises(ValueError):
        SubjectTrack("x").add(0, 0, [0.0, 0.0])


# ------------------------------------------------------------ consistency


def test_constant_and_alternating_features():
    clip = [EventClip(0, 0, 10)]
    const = SubjectTrack("a")
    alt = SubjectTrack("b")
    for f in range(6):
        const.add(0, f, [1.0, 2.0])
        alt.add(0, f, [1.0, 0.0] if f % 2 == 0 else [0.0, 1.0])
    assert intra_event_consistency(const, clip).normalized == pytest.approx(1.0)
    assert intra_event_consistency(alt, clip).normalized == pytest.approx(0.0)


def test_intra_event_hand_listed_fixture():
    # two events of lengths 10 and 30; subject "a" in both, "b" only in event 1
    clips = [EventClip(0, 0, 10), EventClip(1, 10, 40)]
    a, b = SubjectTrack("a"), SubjectTrack("b")
    a.add(0, 0, [1, 0]); a.add(0, 5, [1, 1])
    a.add(1, 10, [0, 1]); a.add(1, 20, [0, 1]); a.add(1, 30, [1, 0])
    b.add(1, 12, [1, 0]); b.add(1, 22, [1, 0])
    b.add(0, 3, [5, 5])  # a single appearance: excluded from event 0
    c45 = math.cos(math.pi / 4)
    e0 = c45
    e1 = ((1 + 0) / 2 + 1) / 2
    want = (10 * e0 + 30 * e1) / 40
    assert intra_event_consistency({"a": a, "b": b}, clips).raw == pytest.approx(want, abs=1e-12)


def test_inter_event_hand_listed_fixture():
    a, b, solo = SubjectTrack("a"), SubjectTrack("b"), SubjectTrack("solo")
    a.add(0, 0, [1, 0]); a.add(0, 1, [0, 1])
    a.add(1, 5, [1, 0])
    a.add(2, 9, [1, 1])
    b.add(0, 0, [1, 0]); b.add(2, 9, [1, 0])
    solo.add(1, 5, [0, 1]); solo.add(1, 6, [0, 1])
    c45 = math.cos(math.pi / 4)
    s01 = (1 + 0) / 2
    s02 = (c45 + c45) / 2
    s12 = c45
    want = ((s01 + s02 + s12) / 3 + 1.0) / 2
    score = inter_event_consistency([a, b, solo])
    assert score.raw == pytest.approx(want, abs=1e-12)
    assert set(score.diagnostics["subjects"]) == {"a", "b"}


def test_inter_event_identical_and_single_event():
    t = SubjectTrack("x")
    t.add(0, 0, [3, 4]); t.add(1, 9, [3, 4])
    assert inter_event_consistency(t).normalized == pytest.approx(1.0)
    only = SubjectTrack("y")
    only.add(0, 0, [1, 0]); only.add(0, 1, [1, 0])
    assert inter_event_consistency(only).status is Status.NOT_APPLICABLE
