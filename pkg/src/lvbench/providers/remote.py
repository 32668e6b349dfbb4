"""Network backends: a generic JSON-over-HTTP endpoint and OpenAI-compatible APIs.

Credentials are read from environment variables whose *names* are given in
params (``api_key_env``); keys never enter requests that reach the cache.
"""

from __future__ import annotations

import base64
import os
from typing import Any, Mapping

import cv2
import httpx
import numpy as np

from ..core import VideoAsset
from ..video import VideoReader, uniform_indices
from .base import ProviderError, ProviderKind, TransientProviderError
from .cache import decode, encode


def _headers(params: Mapping[str, Any]) -> dict[str, str]:
    env = params.get("api_key_env")
    if not env:
        return {}
    key = os.environ.get(str(env))
    if not key:
        raise ProviderError(f"environment variable {env} is not set")
    return {"Authorization": f"Bearer {key}"}


def _post(url: str, body: Any, params: Mapping[str, Any]) -> Any:
    try:
        resp = httpx.post(url, json=body, headers=_headers(params), timeout=float(params.get("timeout_s", 120)))
    except (httpx.TimeoutException, httpx.TransportError) as exc:
        raise TransientProviderError(f"{url}: {exc}") from exc
    if resp.status_code == 429 or resp.status_code >= 500:
        raise TransientProviderError(f"{url}: HTTP {resp.status_code}")
    if resp.status_code >= 400:
        raise ProviderError(f"{url}: HTTP {resp.status_code}: {resp.text[:300]}")
    return resp.json()


def _wire(value: Any) -> Any:
    if isinstance(value, VideoAsset):
        return {"path": value.path, "fps": value.fps, "frame_count": value.frame_count}
    if isinstance(value, Mapping):
        return {k: _wire(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_wire(v) for v in value]
    return encode(value) if isinstance(value, np.ndarray) else value


class HttpJsonBackend:
    """POST ``{"kind", "request", "params"}`` and read ``{"response": ...}``.

    Arrays travel base64-encoded (same codec as the cache); videos travel as
    path/fps/frame_count so the server must share the filesystem.
    """

    def __init__(self, kind: ProviderKind, url: str):
        self.kind = kind
        self.url = url

    def __call__(self, request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
        wire_params = {k: v for k, v in params.items() if k not in ("api_key_env", "timeout_s")}
        body = {"kind": self.kind.value, "request": _wire(request), "params": wire_params}
        payload = _post(self.url, body, params)
        if not isinstance(payload, dict) or "response" not in payload:
            raise ProviderError(f"{self.url}: response body lacks 'response'")
        return decode(payload["response"])


def _jpeg_data_url(frame: np.ndarray, max_side: int) -> str:
    h, w = frame.shape[:2]
    scale = min(1.0, max_side / max(h, w))
    if scale < 1.0:
        frame = cv2.resize(frame, (round(w * scale), round(h * scale)), interpolation=cv2.INTER_AREA)
    ok, buf = cv2.imencode(".jpg", cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    if not ok:
        raise ProviderError("jpeg encoding failed")
    return "data:image/jpeg;base64," + base64.b64encode(buf.tobytes()).decode("ascii")


class OpenAIBackend:
    """Chat and embedding calls against an OpenAI-compatible server.

    Video roles send ``max_frames`` uniformly sampled frames as images.
    ``seed`` is offset by the request's ``trial`` so repeated trials differ
    while each one stays reproducible.
    """

    def __init__(self, kind: ProviderKind, model: str):
        self.kind = kind
        self.model = model

    def __call__(self, request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
        base = str(params.get("base_url", "https://api.openai.com/v1")).rstrip("/")
        p = {"api_key_env": "OPENAI_API_KEY", **params}
        if self.kind is ProviderKind.TEXT_EMBEDDER:
            data = _post(f"{base}/embeddings", {"model": self.model, "input": request["text"]}, p)
            return data["data"][0]["embedding"]
        if self.kind not in (
            ProviderKind.TEXT_LLM,
            ProviderKind.COMPLEXITY_JUDGE,
            ProviderKind.VIDEO_DESCRIBER,
            ProviderKind.QUESTION_ANSWERER,
        ):
            raise ProviderError(f"openai backend does not serve {self.kind.value}")
        content: list[dict[str, Any]] = [{"type": "text", "text": request["prompt"]}]
        video = request.get("video")
        if isinstance(video, VideoAsset):
            idx = uniform_indices(0, video.frame_count, int(p.get("max_frames", 16)))
            for frame in VideoReader(video).read(idx):
                url = _jpeg_data_url(frame, int(p.get("frame_max_side", 512)))
                content.append({"type": "image_url", "image_url": {"url": url}})
        body: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": "user", "content": content}],
            "temperature": float(p.get("temperature", 0.0)),
        }
        if "seed" in p or "trial" in p:
            body["seed"] = int(p.get("seed", 0)) + int(p.get("trial", 0)) * 1000 + int(p.get("attempt", 0))
        data = _post(f"{base}/chat/completions", body, p)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ProviderError(f"malformed chat response: {str(data)[:300]}") from None
