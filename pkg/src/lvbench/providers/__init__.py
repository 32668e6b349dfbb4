"""Provider hub: one cached, retrying interface over every external model role."""

from .base import (
    ProviderError,
    ProviderKind,
    ProviderSchemaError,
    ProviderSpec,
    TransientProviderError,
)
from .cache import CacheKey, DiskCache, MemoryCache, make_key
from .hub import ProviderHub
from .parsing import ExtractionError, canonical_answer, parse_json_block

__all__ = [
    "CacheKey",
    "DiskCache",
    "ExtractionError",
    "MemoryCache",
    "ProviderError",
    "ProviderHub",
    "ProviderKind",
    "ProviderSchemaError",
    "ProviderSpec",
    "TransientProviderError",
    "canonical_answer",
    "make_key",
    "parse_json_block",
]
