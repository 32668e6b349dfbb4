"""Content-addressed response cache.

Keys hash the provider role, backend identifier, effective parameters and the
request payload. Videos enter the digest through their file contents and
arrays through their raw bytes, so renaming a sample or reordering a suite
still hits the cache.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..core import VideoAsset
from ..video import content_digest


def _canonical(value: Any) -> Any:
    if isinstance(value, VideoAsset):
        return {"__video__": content_digest(value)}
    if isinstance(value, np.ndarray):
        arr = np.ascontiguousarray(value)
        return {
            "__array__": hashlib.sha256(arr.tobytes()).hexdigest(),
            "dtype": str(arr.dtype),
            "shape": list(arr.shape),
        }
    if isinstance(value, Mapping):
        return {str(k): _canonical(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass(frozen=True)
class CacheKey:
    kind: str
    digest: str

    @property
    def filename(self) -> str:
        return f"{self.kind}/{self.digest[:2]}/{self.digest}.json"


def make_key(kind: str, identifier: str, params: Mapping[str, Any], request: Mapping[str, Any]) -> CacheKey:
    payload = json.dumps(
        {"identifier": identifier, "params": _canonical(params), "request": _canonical(request)},
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return CacheKey(kind, hashlib.sha256(payload.encode("utf-8")).hexdigest())


def encode(value: Any) -> Any:
    """JSON-safe encoding that round-trips numpy arrays bit-exactly."""
    if isinstance(value, np.ndarray):
        arr = np.ascontiguousarray(value)
        return {
            "__ndarray__": base64.b64encode(arr.tobytes()).decode("ascii"),
            "dtype": str(arr.dtype),
            "shape": list(arr.shape),
        }
    if isinstance(value, Mapping):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def decode(value: Any) -> Any:
    if isinstance(value, dict):
        if "__ndarray__" in value:
            raw = base64.b64decode(value["__ndarray__"])
            return np.frombuffer(raw, dtype=np.dtype(value["dtype"])).reshape(value["shape"]).copy()
        return {k: decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode(v) for v in value]
    return value


MISS = object()


class MemoryCache:
    def __init__(self) -> None:
        self._entries: dict[CacheKey, str] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: CacheKey) -> Any:
        with self._lock:
            body = self._entries.get(key)
            if body is None:
                self.misses += 1
                return MISS
            self.hits += 1
        return decode(json.loads(body)["response"])

    def put(self, key: CacheKey, response: Any, provider_version: str) -> None:
        body = json.dumps({"request_digest": key.digest, "response": encode(response), "provider_version": provider_version})
        with self._lock:
            self._entries[key] = body


class DiskCache:
    """One JSON file per key; writes go to a temp file then ``os.replace``."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def path_for(self, key: CacheKey) -> Path:
        return self.root / key.filename

    def get(self, key: CacheKey) -> Any:
        path = self.path_for(key)
        try:
            body = json.loads(path.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            with self._lock:
                self.misses += 1
            return MISS
        with self._lock:
            self.hits += 1
        return decode(body["response"])

    def put(self, key: CacheKey, response: Any, provider_version: str) -> None:
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = {
            "request_digest": key.digest,
            "response": encode(response),
            "provider_version": provider_version,
            "timestamp": time.time(),
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(body, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
