"""Synthetic videos, fixture suites and hub builders shared by the tests."""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from lvbench.core import (
    HERD_DIMENSIONS,
    ActionSpec,
    EventSpec,
    HerdQuestion,
    PromptRecord,
    Suite,
    dump_suite,
)
from lvbench.config import load_config
from lvbench.providers import MemoryCache, ProviderHub, ProviderKind, ProviderSpec
from lvbench.video import probe, save_npz

H, W = 48, 64


def smooth_scene(kind: int, n: int, drift: float = 0.0, h: int = H, w: int = W) -> np.ndarray:
    """Low-frequency colour pattern; ``drift`` shifts it horizontally per frame."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    frames = []
    for i in range(n):
        x = xx + drift * i
        if kind == 0:
            img = np.stack([128 + 100 * np.sin(x / 9), 128 + 80 * np.cos(yy / 7), 60 + 0 * x], -1)
        elif kind == 1:
            img = np.stack([40 + 0 * x, 128 + 100 * np.sin((x + yy) / 5), 200 - 100 * np.cos(yy / 11)], -1)
        else:
            img = np.stack([200 - 60 * np.cos(x / 13), 90 + 0 * x, 128 + 90 * np.sin(yy / 6 + x / 17)], -1)
        frames.append(img)
    return np.clip(np.round(np.array(frames)), 0, 255).astype(np.uint8)


def hard_cut(n: int = 60, at: int = 30, drift: float = 0.0) -> np.ndarray:
    a, b = smooth_scene(0, n, drift), smooth_scene(1, n, drift)
    return np.concatenate([a[:at], b[at:]])


def cross_fade(n: int = 60, start: int = 22, length: int = 16, drift: float = 0.0) -> np.ndarray:
    a, b = smooth_scene(0, n, drift), smooth_scene(1, n, drift)
    alpha = np.clip((np.arange(n) - start) / length, 0, 1)[:, None, None, None]
    return np.round(a * (1 - alpha) + b * alpha).astype(np.uint8)


def square_video(n: int = 24, step: int = 3, size: int = 12, bg: int = 30, color=(220, 60, 60)) -> np.ndarray:
    frames = np.full((n, H, W, 3), bg, dtype=np.uint8)
    for i in range(n):
        x = (4 + i * step) % (W - size)
        frames[i, 18 : 18 + size, x : x + size] = color
    return frames


def write_video(path: Path, frames: np.ndarray, fps: float = 8.0, sample_id: str | None = None):
    save_npz(path, frames, fps)
    return probe(path, sample_id)


def hub(overrides: Mapping[ProviderKind, tuple[str, Mapping[str, Any]] | str] | None = None, **kwargs: Any) -> ProviderHub:
    specs = {}
    for kind, val in (overrides or {}).items():
        ident, params = (val, {}) if isinstance(val, str) else val
        specs[kind] = ProviderSpec(kind, ident, dict(params))
    kwargs.setdefault("backoff_s", 0.0)
    return ProviderHub(specs, cache=MemoryCache(), **kwargs)


def herd_questions(dimension_count: int = 7, per_dimension: int = 6) -> tuple[HerdQuestion, ...]:
    out = []
    for d, i in itertools.product(HERD_DIMENSIONS[:dimension_count], range(per_dimension)):
        pol = "negative" if i % 3 == 2 else "positive"
        verb = "fail to show" if pol == "negative" else "show"
        out.append(HerdQuestion(d, f"Does the video {verb} {d.replace('-', ' ')} aspect {i}?", pol))
    return tuple(out)


def fixture_record(idx: int, **changes: Any) -> PromptRecord:
    subjects = ["woman", "chef", "", "man", "dancer"]
    subj = subjects[idx % len(subjects)]
    events = (
        EventSpec(f"A {subj or 'valley'} appears at dawn.", subj, "misty valley", "appears", "static"),
        EventSpec(f"The {subj or 'river'} moves toward the river.", subj, "river bank", "moves toward river", "pan right"),
        EventSpec(f"The sun rises over the {subj or 'hills'}.", "", "hills", "sun rises", "tilt up"),
    )
    base = " ".join(e.event for e in events)
    actions = (ActionSpec(subj, "walks along the river"),) if subj else ()
    rec = PromptRecord(
        id=f"s{idx}",
        theme="travel" if idx % 2 else "nature",
        category="human-real-life" if subj else "nature-exploration",
        prompt_text=base + " The viewer should feel calm and inspired by the gentle pacing.",
        prompt_base=base,
        ground_truth_events=events,
        herd_questions=herd_questions(),
        human_actions=actions,
    )
    return PromptRecord(**{**rec.__dict__, **changes})


def fixture_suite(n: int = 5) -> Suite:
    return Suite("test-1", tuple(fixture_record(i) for i in range(n)))


def fixture_video(idx: int) -> np.ndarray:
    kinds = idx % 3
    if idx % 2 == 0:
        return hard_cut(n=40, at=20, drift=1.0) if kinds else square_video(n=40)
    return np.concatenate([smooth_scene(kinds, 20, 0.5), smooth_scene((kinds + 1) % 3, 20, 0.5)])


def write_fixture_corpus(root: Path, n: int = 5) -> tuple[Path, Path]:
    videos = root / "videos"
    videos.mkdir(parents=True, exist_ok=True)
    suite = fixture_suite(n)
    for i, rec in enumerate(suite.samples):
        save_npz(videos / f"{rec.id}.npz", fixture_video(i), 8.0)
    suite_path = root / "suite.json"
    dump_suite(suite, suite_path)
    return suite_path, videos


def mock_config(tmp: Path, *extra: str) -> dict[str, Any]:
    """All-mock run configuration reading ``.npz`` fixtures, with its cache under ``tmp``."""
    return load_config(
        env={},
        overrides=["runtime.video_extensions=['.npz']", "runtime.backoff_s=0", f"cache.dir={tmp / 'cache'}", *extra],
    )
