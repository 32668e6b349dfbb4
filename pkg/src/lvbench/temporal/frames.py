"""Small frame-level helpers shared by the temporal metrics."""

from __future__ import annotations

import numpy as np

from ..providers import ProviderHub, ProviderKind


def mad(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute difference on the 8-bit scale, over all pixels and channels."""
    return float(np.abs(a.astype(np.int16) - b.astype(np.int16)).mean())


def flow(hub: ProviderHub, a: np.ndarray, b: np.ndarray, sample_id: str | None = None) -> np.ndarray:
    """Dense flow from ``a`` to ``b`` (so that b(x + flow(x)) ~ a(x))."""
    return hub.invoke(ProviderKind.FLOW_ESTIMATOR, {"frame_a": a, "frame_b": b}, sample_id=sample_id)


def embed_frame(hub: ProviderHub, image: np.ndarray, sample_id: str | None = None) -> np.ndarray:
    return np.asarray(hub.invoke(ProviderKind.FRAME_EMBEDDER, {"image": image}, sample_id=sample_id), dtype=np.float64)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of two vectors; callers pass unit vectors so this is a dot product clipped to [-1, 1]."""
    return float(np.clip(np.dot(u, v), -1.0, 1.0))
