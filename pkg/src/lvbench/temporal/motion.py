"""Pixel- and flow-level temporal metrics: dynamics, smoothness, flicker, warping, semantics."""

from __future__ import annotations

import math

import cv2
import numpy as np

from ..core import MetricScore, VideoAsset, clamp01, mean
from ..providers import ProviderHub, ProviderKind
from ..video import VideoReader, uniform_indices
from .frames import cosine, embed_frame, flow, mad


def _need_frames(video: VideoAsset, n: int, metric_id: str) -> None:
    if video.frame_count < n:
        raise ValueError(f"{metric_id} needs at least {n} frames, video has {video.frame_count}")


def _spread(items: list, limit: int | None) -> list:
    """Keep at most ``limit`` evenly spaced items."""
    if not limit or len(items) <= limit:
        return items
    return [items[i] for i in uniform_indices(0, len(items), limit)]


def dynamic_degree(
    video: VideoAsset,
    hub: ProviderHub,
    *,
    stride: int | None = None,
    magnitude_threshold: float | None = None,
    relative_threshold: float = 6.0,
    top_fraction: float = 0.05,
    min_dynamic_fraction: float = 0.25,
    max_side: int | None = None,
) -> MetricScore:
    """Binary verdict on whether the video contains significant motion.

    Frame pairs are taken ``stride`` frames apart (default: about eight pairs
    per second). Each pair's statistic is the mean of its largest
    ``top_fraction`` flow magnitudes. A pair is dynamic when the statistic
    exceeds ``magnitude_threshold`` pixels, which defaults to
    ``relative_threshold * min(h, w) / 256`` so the cut-off scales with
    resolution. The video is dynamic when at least ``min_dynamic_fraction``
    of its pairs are.
    """
    _need_frames(video, 2, "dynamic_degree")
    step = stride or max(1, round(video.fps / 8))
    step = min(step, video.frame_count - 1)
    starts = list(range(0, video.frame_count - step, step))
    reader = VideoReader(video, max_side=max_side)
    stats = []
    shape = None
    for s in starts:
        a, b = reader.read([s, s + step])
        shape = a.shape
        mag = np.hypot(*np.moveaxis(flow(hub, a, b, video.sample_id), -1, 0)).ravel()
        top = max(1, math.ceil(mag.size * top_fraction))
        stats.append(float(np.partition(mag, mag.size - top)[-top:].mean()))
    threshold = magnitude_threshold if magnitude_threshold is not None else relative_threshold * min(shape[:2]) / 256
    dynamic_pairs = sum(s > threshold for s in stats)
    fraction = dynamic_pairs / len(stats)
    verdict = 1.0 if fraction >= min_dynamic_fraction else 0.0
    return MetricScore(
        "dynamic_degree",
        fraction,
        verdict,
        diagnostics={"stride": step, "threshold_px": threshold, "pairs": len(stats), "dynamic_pairs": dynamic_pairs, "max_statistic": max(stats)},
    )


def motion_smoothness(video: VideoAsset, hub: ProviderHub, *, max_triplets: int | None = None, max_side: int | None = None) -> MetricScore:
    """Drop every odd frame, rebuild it from its neighbours, and score the reconstruction."""
    _need_frames(video, 3, "motion_smoothness")
    targets = _spread(list(range(1, video.frame_count - 1, 2)), max_triplets)
    reader = VideoReader(video, max_side=max_side)
    errors = []
    for t in targets:
        prev, true, nxt = reader.read([t - 1, t, t + 1])
        pred = hub.invoke(ProviderKind.FRAME_INTERPOLATOR, {"frame_a": prev, "frame_b": nxt}, sample_id=video.sample_id)
        errors.append(mad(pred, true))
    err = mean(errors)
    return MetricScore("motion_smoothness", err, clamp01(1.0 - err / 255.0), diagnostics={"reconstructed_frames": len(targets)})


def temporal_flickering(video: VideoAsset, *, static_threshold: float = 2.0, max_side: int | None = None) -> MetricScore:
    """1 - MAD/255 over consecutive pairs whose difference is below ``static_threshold``.

    Pairs at or above the threshold are treated as motion and excluded. If no
    pair qualifies, every pair is used and the fallback is flagged.
    """
    _need_frames(video, 2, "temporal_flickering")
    diffs = []
    prev = None
    for _, frame in VideoReader(video, max_side=max_side).iter_frames():
        if prev is not None:
            diffs.append(mad(prev, frame))
        prev = frame
    static = [d for d in diffs if d < static_threshold]
    diag: dict = {"pairs": len(diffs), "static_pairs": len(static), "static_threshold": static_threshold}
    if not static:
        static = diffs
        diag["note"] = "no-static-fallback"
    value = mean(static)
    return MetricScore("temporal_flickering", value, clamp01(1.0 - value / 255.0), diagnostics=diag)


def warp(frame: np.ndarray, flow_field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``frame`` at x + flow(x); returns the warped image and an in-bounds mask."""
    h, w = flow_field.shape[:2]
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float32), np.arange(h, dtype=np.float32))
    mx = gx + flow_field[..., 0]
    my = gy + flow_field[..., 1]
    warped = cv2.remap(frame, mx, my, interpolation=cv2.INTER_LINEAR, borderMode=cv2.BORDER_CONSTANT, borderValue=0)
    valid = (mx >= 0) & (mx <= w - 1) & (my >= 0) & (my <= h - 1)
    return warped, valid


def _consistent(backward: np.ndarray, forward: np.ndarray) -> np.ndarray:
    """Forward-backward check: forward flow at the backward target should cancel it."""
    fwd_at, _ = warp(forward, backward)
    diff = np.sum((backward + fwd_at) ** 2, axis=-1)
    bound = 0.01 * (np.sum(backward**2, axis=-1) + np.sum(fwd_at**2, axis=-1)) + 0.5
    return diff < bound


def warping_error(
    video: VideoAsset,
    hub: ProviderHub,
    *,
    occlusion_check: bool = False,
    max_pairs: int | None = None,
    max_side: int | None = None,
) -> MetricScore:
    """Warp frame t onto t+1 with estimated flow and score the residual on valid pixels."""
    _need_frames(video, 2, "warping_error")
    reader = VideoReader(video, max_side=max_side)
    errors = []
    for t in _spread(list(range(video.frame_count - 1)), max_pairs):
        cur, nxt = reader.read([t, t + 1])
        back = flow(hub, nxt, cur, video.sample_id)
        warped, valid = warp(cur, back)
        if occlusion_check:
            valid &= _consistent(back, flow(hub, cur, nxt, video.sample_id))
        if not valid.any():
            continue
        diff = np.abs(warped.astype(np.float64) - nxt.astype(np.float64))
        errors.append(float(diff[valid].mean()))
    if not errors:
        return MetricScore.not_applicable("warping_error", "no valid pixels after warping")
    err = mean(errors)
    return MetricScore("warping_error", err, clamp01(1.0 - err / 255.0), diagnostics={"pairs": len(errors)})


def semantic_consistency(video: VideoAsset, hub: ProviderHub, *, max_frames: int = 32, max_side: int | None = None) -> MetricScore:
    """Mean consecutive cosine of frame embeddings, mapped from [-1, 1] to [0, 1]."""
    _need_frames(video, 2, "semantic_consistency")
    idx = uniform_indices(0, video.frame_count, max(2, max_frames))
    frames = VideoReader(video, max_side=max_side).read(idx)
    emb = [embed_frame(hub, f, video.sample_id) for f in frames]
    cos = mean(cosine(a, b) for a, b in zip(emb, emb[1:]))
    return MetricScore("semantic_consistency", cos, clamp01((cos + 1.0) / 2.0), diagnostics={"frames": len(idx)})
