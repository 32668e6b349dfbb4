"""Provider roles, request/response schemas and error types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping

import numpy as np

from ..core import VideoAsset


class ProviderKind(str, Enum):
    TEXT_EMBEDDER = "text_embedder"
    FRAME_EMBEDDER = "frame_embedder"
    VIDEO_DESCRIBER = "video_describer"
    QUESTION_ANSWERER = "question_answerer"
    SCENE_DETECTOR = "scene_detector"
    FLOW_ESTIMATOR = "flow_estimator"
    FRAME_INTERPOLATOR = "frame_interpolator"
    SEGMENTER = "segmenter"
    TEMPORAL_GROUNDER = "temporal_grounder"
    AESTHETIC_SCORER = "aesthetic_scorer"
    TECHNICAL_SCORER = "technical_scorer"
    COMPLEXITY_JUDGE = "complexity_judge"
    # text-only chat model for the suite-side pipelines (event extraction etc.)
    TEXT_LLM = "text_llm"


class ProviderError(RuntimeError):
    """A provider call failed for good (after retries)."""

    def __init__(self, message: str, *, kind: ProviderKind | None = None, sample_id: str | None = None):
        self.kind = kind
        self.sample_id = sample_id
        prefix = f"[{sample_id}] " if sample_id else ""
        role = f"{kind.value}: " if kind else ""
        super().__init__(f"{prefix}{role}{message}")


class TransientProviderError(ProviderError):
    """Timeouts, rate limiting, 5xx; worth retrying."""


class ProviderSchemaError(ProviderError):
    """The request or response does not match the role schema."""


@dataclass(frozen=True)
class ProviderSpec:
    """Which backend serves a role and with which parameters.

    ``identifier`` is ``mock``/``mock:<variant>``, ``local:<name>``, an
    ``http(s)://`` endpoint, or ``openai:<model>``.
    """

    kind: ProviderKind
    identifier: str = "mock"
    params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_config(cls, kind: str | ProviderKind, cfg: Mapping[str, Any] | str) -> ProviderSpec:
        if isinstance(cfg, str):
            return cls(ProviderKind(kind), cfg, {})
        return cls(ProviderKind(kind), str(cfg.get("id", "mock")), dict(cfg.get("params") or {}))


# ---------------------------------------------------------------- requests

_VIDEO_KINDS = {
    ProviderKind.VIDEO_DESCRIBER,
    ProviderKind.QUESTION_ANSWERER,
    ProviderKind.SCENE_DETECTOR,
    ProviderKind.TEMPORAL_GROUNDER,
    ProviderKind.TECHNICAL_SCORER,
}
_IMAGE_KINDS = {ProviderKind.FRAME_EMBEDDER, ProviderKind.SEGMENTER, ProviderKind.AESTHETIC_SCORER}
_PAIR_KINDS = {ProviderKind.FLOW_ESTIMATOR, ProviderKind.FRAME_INTERPOLATOR}
_TEXT_PROMPT_KINDS = {ProviderKind.COMPLEXITY_JUDGE, ProviderKind.TEXT_LLM}


def _is_image(x: Any) -> bool:
    return isinstance(x, np.ndarray) and x.ndim == 3 and x.shape[-1] == 3


def validate_request(kind: ProviderKind, request: Mapping[str, Any]) -> None:
    def need(key: str, check: Callable[[Any], bool], what: str) -> None:
        if key not in request or not check(request[key]):
            raise ProviderSchemaError(f"request field {key!r} must be {what}", kind=kind)

    if kind is ProviderKind.TEXT_EMBEDDER:
        need("text", lambda v: isinstance(v, str), "a string")
    elif kind in _IMAGE_KINDS:
        need("image", _is_image, "an (H, W, 3) array")
        if kind is ProviderKind.SEGMENTER:
            need("text", lambda v: isinstance(v, str), "a string")
    elif kind in _PAIR_KINDS:
        need("frame_a", _is_image, "an (H, W, 3) array")
        need("frame_b", _is_image, "an (H, W, 3) array")
        if request["frame_a"].shape != request["frame_b"].shape:
            raise ProviderSchemaError("frame_a and frame_b shapes differ", kind=kind)
    elif kind in _VIDEO_KINDS:
        need("video", lambda v: isinstance(v, VideoAsset), "a VideoAsset")
        if kind in (ProviderKind.VIDEO_DESCRIBER, ProviderKind.QUESTION_ANSWERER):
            need("prompt", lambda v: isinstance(v, str) and v.strip() != "", "a nonempty string")
        if kind is ProviderKind.TEMPORAL_GROUNDER:
            need("text", lambda v: isinstance(v, str), "a string")
        if kind is ProviderKind.TECHNICAL_SCORER:
            need("start_frame", lambda v: isinstance(v, int), "an int")
            need("end_frame", lambda v: isinstance(v, int) and v > request.get("start_frame", 0), "an int > start_frame")
    elif kind in _TEXT_PROMPT_KINDS:
        need("prompt", lambda v: isinstance(v, str) and v.strip() != "", "a nonempty string")


# --------------------------------------------------------------- responses


def _unit(vec: Any, kind: ProviderKind) -> list[float]:
    arr = np.asarray(vec, dtype=np.float64).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ProviderSchemaError("embedding is empty or non-finite", kind=kind)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ProviderSchemaError("embedding has zero norm", kind=kind)
    return (arr / norm).tolist()


def normalize_response(kind: ProviderKind, request: Mapping[str, Any], response: Any) -> Any:
    """Validate a backend response and coerce it to the canonical form for its role."""
    if kind in (ProviderKind.TEXT_EMBEDDER, ProviderKind.FRAME_EMBEDDER):
        return _unit(response, kind)
    if kind in (ProviderKind.VIDEO_DESCRIBER, ProviderKind.QUESTION_ANSWERER, *_TEXT_PROMPT_KINDS):
        if not isinstance(response, str) or not response.strip():
            raise ProviderSchemaError("expected a nonempty text response", kind=kind)
        return response
    if kind is ProviderKind.SCENE_DETECTOR:
        if not isinstance(response, (list, tuple)):
            raise ProviderSchemaError("expected a list of frame indices", kind=kind)
        try:
            cuts = sorted({int(c) for c in response})
        except (TypeError, ValueError) as exc:
            raise ProviderSchemaError(f"bad frame index: {exc}", kind=kind) from None
        return [c for c in cuts if c >= 0]
    if kind is ProviderKind.FLOW_ESTIMATOR:
        flow = np.asarray(response, dtype=np.float32)
        h, w = request["frame_a"].shape[:2]
        if flow.shape != (h, w, 2) or not np.all(np.isfinite(flow)):
            raise ProviderSchemaError(f"flow shape {flow.shape} != {(h, w, 2)}", kind=kind)
        return flow
    if kind is ProviderKind.FRAME_INTERPOLATOR:
        frame = np.asarray(response)
        if frame.shape != request["frame_a"].shape:
            raise ProviderSchemaError(f"interpolated frame shape {frame.shape}", kind=kind)
        return np.clip(np.rint(frame.astype(np.float64)), 0, 255).astype(np.uint8) if frame.dtype != np.uint8 else frame
    if kind is ProviderKind.SEGMENTER:
        if response is None:
            return None
        mask = np.asarray(response).astype(bool)
        if mask.shape != request["image"].shape[:2]:
            raise ProviderSchemaError(f"mask shape {mask.shape}", kind=kind)
        return mask if mask.any() else None
    if kind is ProviderKind.TEMPORAL_GROUNDER:
        if response is None:
            return None
        try:
            start, end = (float(v) for v in response)
        except (TypeError, ValueError):
            raise ProviderSchemaError("expected [start_s, end_s] or null", kind=kind) from None
        if not (math.isfinite(start) and math.isfinite(end)):
            raise ProviderSchemaError("non-finite span", kind=kind)
        return [start, end]
    if kind in (ProviderKind.AESTHETIC_SCORER, ProviderKind.TECHNICAL_SCORER):
        try:
            value = float(response)
        except (TypeError, ValueError):
            raise ProviderSchemaError("expected a number", kind=kind) from None
        if not math.isfinite(value):
            raise ProviderSchemaError("non-finite score", kind=kind)
        return value
    raise ProviderSchemaError(f"unknown kind {kind}", kind=kind)
