"""Frame-level aesthetic quality and clip-level technical quality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import MetricScore, VideoAsset, clamp01, mean
from .providers import ProviderHub, ProviderKind
from .video import VideoReader, second_anchored_indices


@dataclass(frozen=True)
class RRUB:
    """Aesthetic normalizer: mean of the best ``top_fraction`` of reference scores."""

    value: float
    source_count: int
    top_fraction: float = 0.10

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise ValueError(f"RR-UB value must be positive, got {self.value}")


def compute_rr_ub(reference_scores: Sequence[float], top_fraction: float = 0.10) -> RRUB:
    if not reference_scores:
        raise ValueError("reference_scores must be nonempty")
    if not 0 < top_fraction <= 1:
        raise ValueError(f"top_fraction must be in (0, 1], got {top_fraction}")
    n = len(reference_scores)
    # epsilon keeps 20 * 0.1 from becoming ceil(2.0000000000000004) = 3
    top = max(1, math.ceil(n * top_fraction - 1e-9))
    best = sorted((float(s) for s in reference_scores), reverse=True)[:top]
    return RRUB(mean(best), n, top_fraction)


def score_aesthetic(video: VideoAsset, hub: ProviderHub, rr_ub: RRUB) -> MetricScore:
    """Score one frame per second (t = 0, 1, 2, ... s) and normalize by RR-UB."""
    indices = second_anchored_indices(video)
    frames = VideoReader(video).read(indices)
    raw = [float(hub.invoke(ProviderKind.AESTHETIC_SCORER, {"image": f}, sample_id=video.sample_id)) for f in frames]
    avg = mean(raw)
    return MetricScore(
        "aesthetic_quality",
        avg,
        clamp01(avg / rr_ub.value),
        diagnostics={"frames": indices, "frame_scores": raw, "rr_ub": rr_ub.value},
    )


def clip_bounds(frame_count: int, fps: float, clip_max_s: float = 10.0) -> list[tuple[int, int]]:
    """Split [0, frame_count) into ceil(duration / clip_max_s) near-equal contiguous clips."""
    duration = frame_count / fps
    k = max(1, math.ceil(duration / clip_max_s - 1e-9))
    k = min(k, frame_count)
    edges = [round(i * frame_count / k) for i in range(k + 1)]
    return [(edges[i], edges[i + 1]) for i in range(k)]


def score_technical(
    video: VideoAsset,
    hub: ProviderHub,
    *,
    clip_max_s: float = 10.0,
    provider_range: tuple[float, float] = (0.0, 1.0),
) -> MetricScore:
    """Mean clip score of the technical-quality provider, mapped linearly from ``provider_range``."""
    lo, hi = provider_range
    if not hi > lo:
        raise ValueError(f"provider_range must satisfy lo < hi, got {provider_range}")
    clips = clip_bounds(video.frame_count, video.fps, clip_max_s)
    raw = [
        float(
            hub.invoke(
                ProviderKind.TECHNICAL_SCORER,
                {"video": video, "start_frame": s, "end_frame": e},
                sample_id=video.sample_id,
            )
        )
        for s, e in clips
    ]
    avg = mean(raw)
    return MetricScore(
        "technical_quality",
        avg,
        clamp01((avg - lo) / (hi - lo)),
        diagnostics={"clips": [list(c) for c in clips], "clip_scores": raw, "provider_range": [lo, hi]},
    )
