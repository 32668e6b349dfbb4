"""Uniform, cached, retrying access to every provider role."""

from __future__ import annotations

import logging
import threading
import time
from typing import Any, Callable, Mapping

from . import local, mock
from .base import (
    ProviderError,
    ProviderKind,
    ProviderSchemaError,
    ProviderSpec,
    TransientProviderError,
    normalize_response,
    validate_request,
)
from .cache import MISS, DiskCache, MemoryCache, make_key
from .remote import HttpJsonBackend, OpenAIBackend

logger = logging.getLogger(__name__)

Backend = Callable[[Mapping[str, Any], Mapping[str, Any]], Any]

# params that tune transport, not results; kept out of cache keys
_TRANSPORT_PARAMS = {"api_key_env", "timeout_s", "rate_limit_per_s", "cache", "base_url"}


def make_backend(spec: ProviderSpec) -> Backend:
    ident = spec.identifier
    if ident == "mock" or ident.startswith("mock:"):
        return mock.BACKENDS[spec.kind]
    if ident.startswith("local:"):
        name = ident.split(":", 1)[1]
        try:
            return local.BACKENDS[(spec.kind, name)]
        except KeyError:
            raise ProviderError(f"no local backend {name!r} for {spec.kind.value}") from None
    if ident.startswith(("http://", "https://")):
        return HttpJsonBackend(spec.kind, ident)
    if ident.startswith("openai:"):
        return OpenAIBackend(spec.kind, ident.split(":", 1)[1])
    raise ProviderError(f"unrecognized provider identifier {ident!r}", kind=spec.kind)


class _RateLimiter:
    def __init__(self, per_second: float | None):
        self.interval = 1.0 / per_second if per_second else 0.0
        self._next = 0.0
        self._lock = threading.Lock()

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next - now
            self._next = max(now, self._next) + self.interval
        if delay > 0:
            time.sleep(delay)


class ProviderHub:
    """Routes role requests to backends through a shared response cache.

    ``invoke`` is thread-safe. At most ``max_parallel`` backend calls run at
    once; each provider may additionally be rate limited via the
    ``rate_limit_per_s`` param. Cache hits bypass both limits.
    """

    def __init__(
        self,
        specs: Mapping[ProviderKind, ProviderSpec] | None = None,
        *,
        cache: DiskCache | MemoryCache | None = None,
        retries: int = 2,
        backoff_s: float = 0.5,
        max_parallel: int = 4,
    ):
        self.specs: dict[ProviderKind, ProviderSpec] = {k: ProviderSpec(k) for k in ProviderKind}
        self.specs.update(specs or {})
        self.cache = cache if cache is not None else MemoryCache()
        self.retries = retries
        self.backoff_s = backoff_s
        self._slots = threading.BoundedSemaphore(max_parallel)
        self._backends: dict[ProviderKind, Backend] = {}
        self._limiters: dict[ProviderKind, _RateLimiter] = {}
        self.calls: dict[ProviderKind, int] = {k: 0 for k in ProviderKind}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> ProviderHub:
        providers = cfg.get("providers", {})
        specs = {ProviderKind(k): ProviderSpec.from_config(k, v) for k, v in providers.items()}
        cache_cfg = cfg.get("cache", {})
        cache = DiskCache(cache_cfg["dir"]) if cache_cfg.get("enabled", True) and cache_cfg.get("dir") else MemoryCache()
        runtime = cfg.get("runtime", {})
        return cls(
            specs,
            cache=cache,
            retries=int(runtime.get("retries", 2)),
            backoff_s=float(runtime.get("backoff_s", 0.5)),
            max_parallel=int(runtime.get("max_parallel", 4)),
        )

    def register(self, kind: ProviderKind, backend: Backend, spec: ProviderSpec | None = None) -> None:
        """Install a custom backend (e.g. an in-process model) for a role."""
        with self._lock:
            self._backends[kind] = backend
            if spec is not None:
                self.specs[kind] = spec
            self._limiters[kind] = _RateLimiter(self.specs[kind].params.get("rate_limit_per_s"))

    def backend(self, kind: ProviderKind) -> Backend:
        with self._lock:
            if kind not in self._backends:
                self._backends[kind] = make_backend(self.specs[kind])
                self._limiters[kind] = _RateLimiter(self.specs[kind].params.get("rate_limit_per_s"))
            return self._backends[kind]

    def invoke(self, kind: ProviderKind | str, request: Mapping[str, Any], *, sample_id: str | None = None) -> Any:
        kind = ProviderKind(kind)
        spec = self.specs[kind]
        try:
            validate_request(kind, request)
        except ProviderSchemaError as exc:
            raise ProviderSchemaError(str(exc), kind=kind, sample_id=sample_id) from None

        params = {**spec.params, **(request.get("params") or {})}
        key_params = {k: v for k, v in params.items() if k not in _TRANSPORT_PARAMS}
        use_cache = bool(spec.params.get("cache", True))
        key = make_key(kind.value, spec.identifier, key_params, {k: v for k, v in request.items() if k != "params"})
        if use_cache:
            hit = self.cache.get(key)
            if hit is not MISS:
                return hit
        response = self._call(kind, spec, request, params, sample_id)
        if use_cache:
            self.cache.put(key, response, spec.identifier)
        return response

    def _call(self, kind: ProviderKind, spec: ProviderSpec, request: Mapping[str, Any], params: dict[str, Any], sample_id: str | None) -> Any:
        backend = self.backend(kind)
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * attempt)
            self._limiters[kind].wait()
            try:
                with self._slots:
                    with self._lock:
                        self.calls[kind] += 1
                    raw = backend(request, params)
                return normalize_response(kind, request, raw)
            except (TransientProviderError, ProviderSchemaError) as exc:
                last = exc
                logger.warning("%s attempt %d failed for %s: %s", kind.value, attempt + 1, sample_id, exc)
            except ProviderError as exc:
                raise ProviderError(str(exc), kind=kind, sample_id=sample_id) from exc
        raise ProviderError(f"failed after {self.retries + 1} attempts: {last}", kind=kind, sample_id=sample_id)
