"""Smoothness of scene transitions.

Around each detected transition, every frame is compared with its
predecessor on four features (pixel MAE, SSIM, frame-embedding cosine and
motion consistency). The features are rescaled within the window, combined
with weights, and the spread of the resulting sequence measures abruptness:
a hard cut concentrates all change in one frame, a gradual transition spreads
it evenly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import cv2
import numpy as np
from skimage.metrics import structural_similarity

from ..core import MetricScore, VideoAsset, mean
from ..providers import ProviderHub, ProviderKind
from ..video import VideoReader
from .frames import cosine, embed_frame, flow, mad

FEATURES = ("mae", "ssim", "embedding", "motion")

# mean flow vectors shorter than this (pixels) count as "no motion"
_STILL_FLOW = 0.05


@dataclass(frozen=True)
class TransitionParams:
    k: int = 8
    alpha: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    b: float = 1e4
    c: float = 1.0
    range_floor: float = 0.05

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        if len(self.alpha) != 4 or abs(math.fsum(self.alpha) - 1.0) > 1e-9:
            raise ValueError(f"alpha must be four weights summing to 1, got {self.alpha}")
        if not (self.b > 0 and self.c > 0):
            raise ValueError("b and c must be positive")
        if self.range_floor < 0:
            raise ValueError("range_floor must be non-negative")


@dataclass(frozen=True)
class TransitionWindow:
    transition_frame: int
    k: int
    similarity_sequence: tuple[float, ...]
    weights: tuple[float, float, float, float]
    b: float
    c: float
    features: dict[str, tuple[float, ...]] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self) -> None:
        if len(self.similarity_sequence) != 2 * self.k:
            raise ValueError("similarity sequence must hold 2k values")


def detect_transitions(video: VideoAsset, hub: ProviderHub, *, k: int = 8) -> list[int]:
    """Scene-detector cut frames, sorted, with cuts within ``k`` frames of a kept one dropped."""
    cuts = hub.invoke(ProviderKind.SCENE_DETECTOR, {"video": video}, sample_id=video.sample_id)
    kept: list[int] = []
    for t in sorted(set(int(c) for c in cuts)):
        if not 0 < t < video.frame_count:
            continue
        if kept and t - kept[-1] <= k:
            continue
        kept.append(t)
    return kept


def window_normalize(values: Sequence[float], range_floor: float = 0.0) -> np.ndarray:
    """Rescale so the window maximum maps to 1.

    With ``range_floor = 0`` this is plain min-max scaling. A positive floor
    caps the amplification applied to windows whose values barely vary, so
    quantization noise is not stretched to the full [0, 1] range. A window
    with no variation maps to constant 1.
    """
    x = np.asarray(values, dtype=np.float64)
    hi, lo = x.max(), x.min()
    span = max(hi - lo, range_floor)
    if span == 0:
        return np.ones_like(x)
    return 1.0 - (hi - x) / span


def _ssim(a: np.ndarray, b: np.ndarray) -> float:
    ga = cv2.cvtColor(a, cv2.COLOR_RGB2GRAY)
    gb = cv2.cvtColor(b, cv2.COLOR_RGB2GRAY)
    win = min(7, *ga.shape) | 1  # odd, no larger than the image
    return float(structural_similarity(ga, gb, data_range=255, win_size=win))


def _motion_consistency(f_prev: np.ndarray, f_cur: np.ndarray) -> float:
    u = f_prev.reshape(-1, 2).mean(axis=0).astype(np.float64)
    v = f_cur.reshape(-1, 2).mean(axis=0).astype(np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    still_u, still_v = nu < _STILL_FLOW, nv < _STILL_FLOW
    if still_u and still_v:
        return 1.0
    if still_u or still_v:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def raw_features(frames: Sequence[np.ndarray], hub: ProviderHub, sample_id: str | None = None) -> dict[str, list[float]]:
    """Per-frame similarity to the previous frame for frames[2:], on four features.

    ``frames`` holds 2k + 2 consecutive frames; the first two only provide
    history (the motion feature needs two preceding flows).
    """
    flows = [flow(hub, a, b, sample_id) for a, b in zip(frames, frames[1:])]
    emb = [embed_frame(hub, f, sample_id) for f in frames[1:]]
    out: dict[str, list[float]] = {f: [] for f in FEATURES}
    for i in range(2, len(frames)):
        out["mae"].append(1.0 - mad(frames[i], frames[i - 1]) / 255.0)
        out["ssim"].append(_ssim(frames[i], frames[i - 1]))
        out["embedding"].append(cosine(emb[i - 1], emb[i - 2]))
        out["motion"].append(_motion_consistency(flows[i - 2], flows[i - 1]))
    return out


def combine_features(features: dict[str, Sequence[float]], alpha: Sequence[float], range_floor: float = 0.0) -> np.ndarray:
    return sum(a * window_normalize(features[name], range_floor) for a, name in zip(alpha, FEATURES))


def transition_similarity_sequence(
    frames: Sequence[np.ndarray],
    weights: Sequence[float],
    hub: ProviderHub,
    *,
    range_floor: float = 0.0,
    sample_id: str | None = None,
) -> tuple[np.ndarray, dict[str, list[float]]]:
    feats = raw_features(frames, hub, sample_id)
    return combine_features(feats, weights, range_floor), feats


def smoothness_from_sequence(sequence: Sequence[float], b: float = 1e4, c: float = 1.0) -> tuple[float, float, float]:
    """(variance, abruptness A, smoothness 1 - A) of the sum-normalized sequence."""
    s = np.asarray(sequence, dtype=np.float64)
    total = s.sum()
    if np.ptp(s) == 0 or total == 0:
        return 0.0, 0.0, 1.0
    var = float(np.var(s / total))
    abrupt = var * b / (var * b + c)
    return var, abrupt, 1.0 - abrupt


def transition_smoothness(
    video: VideoAsset,
    hub: ProviderHub,
    params: TransitionParams = TransitionParams(),
    *,
    transitions: Sequence[int] | None = None,
    max_side: int | None = None,
) -> tuple[MetricScore, list[dict[str, Any]]]:
    """Mean transition smoothness over detected transitions, plus per-transition artifacts."""
    points = list(transitions) if transitions is not None else detect_transitions(video, hub, k=params.k)
    reader = VideoReader(video, max_side=max_side)
    artifacts: list[dict[str, Any]] = []
    scores: list[float] = []
    skipped = []
    for t in points:
        k = min(params.k, t - 2, video.frame_count - t)
        if k < 1:
            skipped.append(t)
            continue
        frames = reader.read(range(t - k - 2, t + k))
        seq, feats = transition_similarity_sequence(frames, params.alpha, hub, range_floor=params.range_floor, sample_id=video.sample_id)
        window = TransitionWindow(t, k, tuple(float(x) for x in seq), tuple(params.alpha), params.b, params.c, {n: tuple(v) for n, v in feats.items()}, k < params.k)
        var, abrupt, smooth = smoothness_from_sequence(window.similarity_sequence, params.b, params.c)
        scores.append(smooth)
        artifacts.append(
            {
                "transition_frame": t,
                "k": k,
                "truncated": window.truncated,
                "features": {n: list(v) for n, v in window.features.items()},
                "sequence": list(window.similarity_sequence),
                "variance": var,
                "abruptness": abrupt,
                "smoothness": smooth,
            }
        )
    diag: dict[str, Any] = {"transitions": points}
    if any(a["truncated"] for a in artifacts):
        diag["truncated_windows"] = [a["transition_frame"] for a in artifacts if a["truncated"]]
    if skipped:
        diag["skipped_at_boundary"] = skipped
    if not scores:
        diag["note"] = "no-transitions"
        return MetricScore("transition_smoothness", 1.0, 1.0, diagnostics=diag), artifacts
    value = mean(scores)
    return MetricScore("transition_smoothness", value, min(1.0, max(0.0, value)), diagnostics=diag), artifacts
