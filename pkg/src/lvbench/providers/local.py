"""Backends that run in-process on OpenCV: optical flow, cut detection, blending."""

from __future__ import annotations

from typing import Any, Callable, Mapping

import cv2
import numpy as np

from ..core import VideoAsset
from ..video import VideoReader
from .base import ProviderKind


def farneback_flow(request: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
    """Dense flow from frame_a to frame_b: frame_b(x + flow(x)) ~ frame_a(x)."""
    a = cv2.cvtColor(request["frame_a"], cv2.COLOR_RGB2GRAY)
    b = cv2.cvtColor(request["frame_b"], cv2.COLOR_RGB2GRAY)
    return cv2.calcOpticalFlowFarneback(
        a,
        b,
        None,
        pyr_scale=float(params.get("pyr_scale", 0.5)),
        levels=int(params.get("levels", 3)),
        winsize=int(params.get("winsize", 15)),
        iterations=int(params.get("iterations", 3)),
        poly_n=int(params.get("poly_n", 5)),
        poly_sigma=float(params.get("poly_sigma", 1.2)),
        flags=0,
    )


def content_cuts(video: VideoAsset, params: Mapping[str, Any]) -> list[int]:
    """Hard-cut detector on mean HSV change between consecutive frames.

    A cut is reported at the first frame of the new shot when the change
    exceeds ``threshold`` (0-255 scale) and at least ``min_scene_len`` frames
    have passed since the previous cut.
    """
    threshold = float(params.get("threshold", 27.0))
    min_len = int(params.get("min_scene_len", 15))
    max_side = params.get("max_side", 256)
    cuts: list[int] = []
    prev = None
    last = 0
    for i, frame in VideoReader(video, max_side=max_side).iter_frames():
        hsv = cv2.cvtColor(frame, cv2.COLOR_RGB2HSV).astype(np.int16)
        if prev is not None:
            delta = float(np.abs(hsv - prev).mean())
            if delta >= threshold and i - last >= min_len:
                cuts.append(i)
                last = i
        prev = hsv
    return cuts


def scene_detector(request: Mapping[str, Any], params: Mapping[str, Any]) -> list[int]:
    return content_cuts(request["video"], params)


def linear_interpolator(request: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
    mid = (request["frame_a"].astype(np.float64) + request["frame_b"].astype(np.float64)) / 2.0
    return np.clip(np.floor(mid + 0.5), 0, 255).astype(np.uint8)


BACKENDS: dict[tuple[ProviderKind, str], Callable[[Mapping[str, Any], Mapping[str, Any]], Any]] = {
    (ProviderKind.FLOW_ESTIMATOR, "farneback"): farneback_flow,
    (ProviderKind.SCENE_DETECTOR, "content"): scene_detector,
    (ProviderKind.FRAME_INTERPOLATOR, "linear"): linear_interpolator,
}
