"""Event clips, per-subject feature tracks, and intra/inter-event consistency."""

from __future__ import annotations

import itertools
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import cv2
import numpy as np

from ..core import EventSpec, MetricScore, VideoAsset, clamp01, mean
from ..providers import ProviderError, ProviderHub, ProviderKind
from ..video import VideoReader, uniform_indices
from .frames import cosine, embed_frame

logger = logging.getLogger(__name__)

BACKGROUND = "background"


# ------------------------------------------------------------------ clips


@dataclass(frozen=True)
class EventClip:
    event_index: int
    start_frame: int
    end_frame: int
    source: str = "grounded"  # or "fallback-uniform"
    clamped: bool = False

    def __post_init__(self) -> None:
        if not self.start_frame < self.end_frame:
            raise ValueError(f"empty clip [{self.start_frame}, {self.end_frame})")

    @property
    def length(self) -> int:
        return self.end_frame - self.start_frame

    def to_json(self) -> dict[str, Any]:
        return {
            "event_index": self.event_index,
            "start_frame": self.start_frame,
            "end_frame": self.end_frame,
            "source": self.source,
            "clamped": self.clamped,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> EventClip:
        return cls(int(data["event_index"]), int(data["start_frame"]), int(data["end_frame"]), str(data["source"]), bool(data.get("clamped", False)))


def uniform_partition(frame_count: int, parts: int) -> list[tuple[int, int]]:
    edges = [round(i * frame_count / parts) for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def ground_event_clips(video: VideoAsset, events: Sequence[EventSpec], hub: ProviderHub) -> list[EventClip]:
    """One clip per event from the temporal grounder, or the event's uniform share of the video."""
    if not events:
        raise ValueError("events must be nonempty")
    n = video.frame_count
    fallback = uniform_partition(n, len(events))
    clips = []
    for i, ev in enumerate(events):
        span = None
        try:
            span = hub.invoke(ProviderKind.TEMPORAL_GROUNDER, {"video": video, "text": ev.event}, sample_id=video.sample_id)
        except ProviderError as exc:
            logger.info("grounding failed for event %d of %s: %s", i, video.sample_id, exc)
        clip = None
        if span is not None:
            s, e = float(span[0]), float(span[1])
            start, end = math.floor(s * video.fps), math.ceil(e * video.fps)
            cs, ce = max(0, start), min(n, end)
            if cs < ce:
                clip = EventClip(i, cs, ce, "grounded", (cs, ce) != (start, end))
        if clip is None:
            a, b = fallback[i]
            if a >= b:  # more events than frames
                a, b = min(a, n - 1), min(a, n - 1) + 1
            clip = EventClip(i, a, b, "fallback-uniform")
        clips.append(clip)
    return clips


# ----------------------------------------------------------------- tracks


def subject_labels(subject: str) -> list[str]:
    """Split an event's subject field into normalized labels ("a man and a dog" -> two labels)."""
    text = re.sub(r"\s+", " ", subject.strip().lower())
    if not text:
        return []
    parts = re.split(r"\s*(?:,|;|&|\band\b)\s*", text)
    return list(dict.fromkeys(p.strip() for p in parts if p.strip()))


@dataclass
class SubjectTrack:
    """Unit-norm features of one subject (or the background), keyed by (event_index, frame_index)."""

    subject_label: str
    features: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    coverage: dict[tuple[int, int], float] = field(default_factory=dict)

    def add(self, event_index: int, frame_index: int, vector: Any, coverage: float = 1.0) -> None:
        v = np.asarray(vector, dtype=np.float64)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot store a zero feature vector")
        self.features[(event_index, frame_index)] = v / norm
        self.coverage[(event_index, frame_index)] = float(coverage)

    def by_event(self) -> dict[int, list[np.ndarray]]:
        """Feature sequences per event, ordered by frame index."""
        out: dict[int, list[np.ndarray]] = {}
        for (e, _), v in sorted(self.features.items()):
            out.setdefault(e, []).append(v)
        return out


@dataclass
class TrackSet:
    subjects: dict[str, SubjectTrack]
    background: SubjectTrack
    skipped_frames: list[dict[str, Any]] = field(default_factory=list)

    def save(self, directory: str | Path) -> None:
        """Write ``tracks.bin`` (float64 rows) and a ``tracks.json`` manifest."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest: list[dict[str, Any]] = []
        chunks = []
        offset = 0
        for kind, track in [("subject", t) for _, t in sorted(self.subjects.items())] + [("background", self.background)]:
            for (e, f), v in sorted(track.features.items()):
                manifest.append(
                    {
                        "kind": kind,
                        "subject_label": track.subject_label,
                        "event_index": e,
                        "frame_index": f,
                        "offset": offset,
                        "length": int(v.size),
                        "coverage": track.coverage[(e, f)],
                    }
                )
                chunks.append(v.astype("<f8"))
                offset += int(v.size)
        data = np.concatenate(chunks) if chunks else np.zeros(0, dtype="<f8")
        (directory / "tracks.bin").write_bytes(data.tobytes())
        body = {"dtype": "float64-le", "entries": manifest, "skipped_frames": self.skipped_frames}
        (directory / "tracks.json").write_text(json.dumps(body, indent=2, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, directory: str | Path) -> TrackSet:
        directory = Path(directory)
        data = np.frombuffer((directory / "tracks.bin").read_bytes(), dtype="<f8")
        body = json.loads((directory / "tracks.json").read_text(encoding="utf-8"))
        subjects: dict[str, SubjectTrack] = {}
        background = SubjectTrack(BACKGROUND)
        for ent in body["entries"]:
            vec = data[ent["offset"] : ent["offset"] + ent["length"]]
            if ent["kind"] == "background":
                track = background
            else:
                track = subjects.setdefault(ent["subject_label"], SubjectTrack(ent["subject_label"]))
            track.features[(ent["event_index"], ent["frame_index"])] = vec.copy()
            track.coverage[(ent["event_index"], ent["frame_index"])] = ent["coverage"]
        return cls(subjects, background, body.get("skipped_frames", []))


def _crop(frame: np.ndarray, mask: np.ndarray) -> np.ndarray:
    ys, xs = np.nonzero(mask)
    y0, y1, x0, x1 = ys.min(), ys.max() + 1, xs.min(), xs.max() + 1
    return frame[y0:y1, x0:x1] * mask[y0:y1, x0:x1, None].astype(frame.dtype)


def segment_tracks(
    video: VideoAsset,
    clips: Sequence[EventClip],
    events: Sequence[EventSpec],
    hub: ProviderHub,
    *,
    frames_per_clip: int = 16,
    dilate_px: int = 3,
    max_side: int | None = None,
) -> TrackSet:
    """Subject-crop and background features for up to ``frames_per_clip`` frames per clip."""
    reader = VideoReader(video, max_side=max_side)
    subjects: dict[str, SubjectTrack] = {}
    background = SubjectTrack(BACKGROUND)
    skipped: list[dict[str, Any]] = []
    kernel = cv2.getStructuringElement(cv2.MORPH_ELLIPSE, (2 * dilate_px + 1, 2 * dilate_px + 1)) if dilate_px > 0 else None
    for clip in clips:
        labels = subject_labels(events[clip.event_index].subject)
        idx = uniform_indices(clip.start_frame, clip.end_frame, frames_per_clip)
        for fi, frame in zip(idx, reader.read(idx)):
            try:
                masks = {
                    lab: hub.invoke(ProviderKind.SEGMENTER, {"image": frame, "text": lab}, sample_id=video.sample_id)
                    for lab in labels
                }
            except ProviderError as exc:
                skipped.append({"event_index": clip.event_index, "frame_index": fi, "error": str(exc)})
                continue
            union = np.zeros(frame.shape[:2], dtype=bool)
            for lab, mask in masks.items():
                if mask is None or not mask.any():
                    continue
                union |= mask
                track = subjects.setdefault(lab, SubjectTrack(lab))
                track.add(clip.event_index, fi, embed_frame(hub, _crop(frame, mask), video.sample_id), float(mask.mean()))
            if kernel is not None and union.any():
                union = cv2.dilate(union.astype(np.uint8), kernel).astype(bool)
            bg = frame * (~union)[..., None].astype(frame.dtype)
            background.add(clip.event_index, fi, embed_frame(hub, bg, video.sample_id), float(1.0 - union.mean()))
    return TrackSet(subjects, background, skipped)


# ------------------------------------------------------------ consistency


def _tracks(tracks: Mapping[str, SubjectTrack] | Iterable[SubjectTrack] | SubjectTrack) -> list[SubjectTrack]:
    if isinstance(tracks, SubjectTrack):
        return [tracks]
    if isinstance(tracks, Mapping):
        return list(tracks.values())
    return list(tracks)


def intra_event_consistency(
    tracks: Mapping[str, SubjectTrack] | Iterable[SubjectTrack] | SubjectTrack,
    clips: Sequence[EventClip],
    metric_id: str = "intra_event_subject_consistency",
) -> MetricScore:
    """Event-length-weighted mean over events of the mean consecutive-appearance cosine per subject."""
    weights = {c.event_index: c.length for c in clips}
    per_event: dict[int, list[float]] = {}
    for track in _tracks(tracks):
        for e, seq in track.by_event().items():
            if len(seq) < 2:
                continue
            per_event.setdefault(e, []).append(mean(cosine(a, b) for a, b in zip(seq, seq[1:])))
    scored = {e: mean(v) for e, v in per_event.items() if e in weights}
    if not scored:
        return MetricScore.not_applicable(metric_id, "no subject appears in two frames of one event")
    total = math.fsum(weights[e] for e in scored)
    value = math.fsum(weights[e] * s for e, s in scored.items()) / total
    return MetricScore(metric_id, value, clamp01(value), diagnostics={"events": {str(e): s for e, s in sorted(scored.items())}})


def inter_event_consistency(
    tracks: Mapping[str, SubjectTrack] | Iterable[SubjectTrack] | SubjectTrack,
    metric_id: str = "inter_event_subject_consistency",
) -> MetricScore:
    """Mean over subjects seen in at least two events of their mean cross-event similarity."""
    per_subject: dict[str, float] = {}
    for track in _tracks(tracks):
        groups = track.by_event()
        if len(groups) < 2:
            continue
        pair_scores = []
        for ei, ej in itertools.combinations(sorted(groups), 2):
            pair_scores.append(mean(cosine(a, b) for a in groups[ei] for b in groups[ej]))
        per_subject[track.subject_label] = mean(pair_scores)
    if not per_subject:
        return MetricScore.not_applicable(metric_id, "no subject appears in two events")
    value = mean(per_subject.values())
    return MetricScore(metric_id, value, clamp01(value), diagnostics={"subjects": dict(sorted(per_subject.items()))})
