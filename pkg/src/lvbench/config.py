"""Layered run configuration: defaults <- YAML/JSON file <- environment <- ``--set`` overrides.

Environment overrides use ``LVBENCH__SECTION__KEY=value`` (double underscores
separate levels). Values from the environment and ``--set`` are parsed as
YAML scalars, so ``3``, ``0.5``, ``true`` and ``[1, 2]`` keep their types.
"""

from __future__ import annotations

import copy
import os
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

ENV_PREFIX = "LVBENCH__"


class ConfigError(ValueError):
    """The configuration could not be read or is inconsistent."""


DEFAULTS: dict[str, Any] = {
    "providers": {
        # every role defaults to the deterministic mock; see README for real backends
        "text_embedder": "mock",
        "frame_embedder": "mock",
        "video_describer": "mock",
        "question_answerer": "mock",
        "scene_detector": "local:content",
        "flow_estimator": "local:farneback",
        "frame_interpolator": "local:linear",
        "segmenter": "mock",
        "temporal_grounder": "mock",
        "aesthetic_scorer": "mock",
        "technical_scorer": "mock",
        "complexity_judge": "mock",
        "text_llm": "mock",
    },
    "cache": {"dir": ".lvbench-cache", "enabled": True},
    "runtime": {
        "workers": 1,
        "max_parallel": 4,
        "retries": 2,
        "backoff_s": 0.5,
        "format_attempts": 3,
        "video_extensions": [".mp4", ".webm", ".mkv"],
        "analysis_max_side": 512,
        "artifacts": True,
    },
    "metrics": {
        "rr_ub": {"value": 8.0, "top_fraction": 0.10},
        "technical": {"clip_max_s": 10.0, "provider_range": [0.0, 1.0]},
        "dynamic_degree": {
            "stride": None,
            "magnitude_threshold": None,
            "relative_threshold": 6.0,
            "top_fraction": 0.05,
            "min_dynamic_fraction": 0.25,
        },
        "motion_smoothness": {"max_triplets": None},
        "temporal_flickering": {"static_threshold": 2.0},
        "warping_error": {"occlusion_check": False, "max_pairs": None},
        "semantic_consistency": {"max_frames": 32},
        "transition": {"k": 8, "alpha": [0.25, 0.25, 0.25, 0.25], "b": 1.0e4, "c": 1.0, "range_floor": 0.05},
        "event_clips": {"frames_per_clip": 16, "dilate_px": 3},
        "clarity": {"trials": 3},
        "herd": {"questions_per_dimension": 6},
        "correlation": {"spearman_ties": "average", "kendall_variant": "tau-b"},
    },
    "few_shot": {},
    "themes": None,
}


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    out = copy.deepcopy(dict(base))
    for k, v in override.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _set_path(cfg: dict[str, Any], path: Sequence[str], value: Any) -> None:
    node = cfg
    for key in path[:-1]:
        nxt = node.get(key)
        if not isinstance(nxt, dict):
            nxt = {}
            node[key] = nxt
        node = nxt
    node[path[-1]] = value


def _scalar(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def read_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)  # JSON is valid YAML
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping at top level")
    return data


def load_config(
    path: str | Path | None = None,
    *,
    overrides: Sequence[str] = (),
    env: Mapping[str, str] | None = None,
) -> dict[str, Any]:
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        cfg = deep_merge(cfg, read_file(path))
    environ = os.environ if env is None else env
    for key in sorted(environ):
        if key.startswith(ENV_PREFIX):
            parts = [p.lower() for p in key[len(ENV_PREFIX) :].split("__") if p]
            if parts:
                _set_path(cfg, parts, _scalar(environ[key]))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form a.b.c=value")
        dotted, value = item.split("=", 1)
        _set_path(cfg, [p for p in dotted.strip().split(".") if p], _scalar(value))
    validate(cfg)
    return cfg


def validate(cfg: Mapping[str, Any]) -> None:
    m = cfg.get("metrics", {})
    try:
        if not float(m["rr_ub"]["value"]) > 0:
            raise ConfigError("metrics.rr_ub.value must be positive")
        lo, hi = m["technical"]["provider_range"]
        if not float(hi) > float(lo):
            raise ConfigError("metrics.technical.provider_range must be [lo, hi] with lo < hi")
        alpha = m["transition"]["alpha"]
        if not isinstance(alpha, (list, tuple)) or len(alpha) != 4 or abs(sum(float(a) for a in alpha) - 1.0) > 1e-9:
            raise ConfigError("metrics.transition.alpha must be four weights summing to 1")
        if int(m["clarity"]["trials"]) < 1:
            raise ConfigError("metrics.clarity.trials must be >= 1")
        if int(cfg["runtime"]["workers"]) < 1:
            raise ConfigError("runtime.workers must be >= 1")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from exc


def public_view(cfg: Mapping[str, Any]) -> dict[str, Any]:
    """The configuration as echoed into reports: metrics, providers and runtime knobs that affect scores."""
    runtime = cfg.get("runtime", {})
    return {
        "metrics": copy.deepcopy(cfg.get("metrics", {})),
        "providers": copy.deepcopy(cfg.get("providers", {})),
        "runtime": {k: runtime.get(k) for k in ("format_attempts", "analysis_max_side", "video_extensions")},
    }
