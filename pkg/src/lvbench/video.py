"""Video discovery, probing and frame access.

Two container kinds are understood: anything OpenCV can decode, and ``.npz``
archives holding a ``frames`` array (T, H, W, 3) uint8 plus an ``fps`` scalar.
The latter is what the synthetic fixtures use.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import cv2
import numpy as np

from .core import VideoAsset

DEFAULT_EXTENSIONS = (".mp4", ".webm", ".mkv")


class AssetError(RuntimeError):
    """The video file is missing or cannot be decoded."""


def find_video(videos_dir: str | Path, sample_id: str, extensions: Sequence[str] = DEFAULT_EXTENSIONS) -> Path | None:
    base = Path(videos_dir)
    for ext in extensions:
        candidate = base / f"{sample_id}{ext}"
        if candidate.is_file():
            return candidate
    return None


def probe(path: str | Path, sample_id: str | None = None) -> VideoAsset:
    path = Path(path)
    sid = sample_id if sample_id is not None else path.stem
    if not path.is_file():
        raise AssetError(f"{sid}: video not found at {path}")
    if path.suffix == ".npz":
        with np.load(path) as data:
            frames = data["frames"]
            fps = float(data["fps"])
            n = int(frames.shape[0])
    else:
        cap = cv2.VideoCapture(str(path))
        try:
            if not cap.isOpened():
                raise AssetError(f"{sid}: cannot decode {path}")
            fps = float(cap.get(cv2.CAP_PROP_FPS))
            n = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
        finally:
            cap.release()
    if fps <= 0 or n <= 0:
        raise AssetError(f"{sid}: invalid stream (fps={fps}, frames={n})")
    return VideoAsset(sid, str(path), fps, n)


def save_npz(path: str | Path, frames: np.ndarray, fps: float) -> Path:
    path = Path(path)
    frames = np.ascontiguousarray(frames, dtype=np.uint8)
    if frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValueError(f"expected (T, H, W, 3) frames, got {frames.shape}")
    with open(path, "wb") as fh:
        np.savez(fh, frames=frames, fps=np.float64(fps))
    return path


_digest_lock = threading.Lock()
_digests: dict[tuple[str, float, int], str] = {}


def content_digest(asset: VideoAsset) -> str:
    """sha256 of the file bytes, memoized on (path, mtime, size)."""
    p = Path(asset.path)
    st = p.stat()
    key = (str(p.resolve()), st.st_mtime, st.st_size)
    with _digest_lock:
        if key in _digests:
            return _digests[key]
    h = hashlib.sha256()
    with open(p, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    digest = h.hexdigest()
    with _digest_lock:
        _digests[key] = digest
    return digest


class VideoReader:
    """Random-ish access to decoded RGB frames.

    Decoding is sequential under the hood, so callers should request sorted
    index lists. ``max_side`` downscales frames for analysis when set.
    """

    def __init__(self, asset: VideoAsset, max_side: int | None = None):
        self.asset = asset
        self.max_side = max_side
        self._npz: np.ndarray | None = None
        if Path(asset.path).suffix == ".npz":
            with np.load(asset.path) as data:
                self._npz = np.asarray(data["frames"], dtype=np.uint8)

    def __len__(self) -> int:
        return self.asset.frame_count

    def _resize(self, frame: np.ndarray) -> np.ndarray:
        if not self.max_side:
            return frame
        h, w = frame.shape[:2]
        scale = self.max_side / max(h, w)
        if scale >= 1:
            return frame
        return cv2.resize(frame, (max(1, round(w * scale)), max(1, round(h * scale))), interpolation=cv2.INTER_AREA)

    def read(self, indices: Iterable[int]) -> list[np.ndarray]:
        idx = [int(i) for i in indices]
        for i in idx:
            if not 0 <= i < self.asset.frame_count:
                raise IndexError(f"frame {i} outside [0, {self.asset.frame_count})")
        if self._npz is not None:
            return [self._resize(self._npz[i]) for i in idx]
        wanted = sorted(set(idx))
        got: dict[int, np.ndarray] = {}
        cap = cv2.VideoCapture(self.asset.path)
        try:
            if not cap.isOpened():
                raise AssetError(f"{self.asset.sample_id}: cannot decode {self.asset.path}")
            pos = 0
            for target in wanted:
                if target - pos > 64:
                    cap.set(cv2.CAP_PROP_POS_FRAMES, target)
                    pos = target
                while pos <= target:
                    ok, bgr = cap.read()
                    if not ok:
                        raise AssetError(f"{self.asset.sample_id}: decode failed at frame {pos}")
                    if pos == target:
                        got[target] = self._resize(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB))
                    pos += 1
        finally:
            cap.release()
        return [got[i] for i in idx]

    def frame(self, index: int) -> np.ndarray:
        return self.read([index])[0]

    def iter_frames(self, stride: int = 1) -> Iterator[tuple[int, np.ndarray]]:
        if self._npz is not None:
            for i in range(0, self.asset.frame_count, stride):
                yield i, self._resize(self._npz[i])
            return
        cap = cv2.VideoCapture(self.asset.path)
        try:
            i = 0
            while i < self.asset.frame_count:
                ok, bgr = cap.read()
                if not ok:
                    break
                if i % stride == 0:
                    yield i, self._resize(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB))
                i += 1
        finally:
            cap.release()


def second_anchored_indices(asset: VideoAsset) -> list[int]:
    """Frame nearest to t = 0, 1, 2, ... seconds, for every t inside the video."""
    out = []
    t = 0
    while True:
        idx = int(np.floor(t * asset.fps + 0.5))
        if idx >= asset.frame_count:
            break
        out.append(idx)
        t += 1
    return out


def uniform_indices(start: int, end: int, count: int) -> list[int]:
    """Up to ``count`` evenly spaced frame indices in [start, end)."""
    n = end - start
    if n <= 0:
        return []
    if n <= count:
        return list(range(start, end))
    return sorted({start + int(round(i * (n - 1) / (count - 1))) for i in range(count)}) if count > 1 else [start]
