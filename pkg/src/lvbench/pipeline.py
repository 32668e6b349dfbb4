"""Run orchestration: per-sample evaluation, artifacts, checkpoints and the method report."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Mapping

from . import __version__, templates
from .aggregate import DEFAULT_CORRELATION_PAIRS, correlation_table, group_by_category, summarize
from .alignment import TextEmbeddings, align_events, describe_video, extract_events, matching_artifact, overall_alignment
from .clarity_herd import clarity_score, herd_answer, herd_score, run_clarity_trials
from .config import public_view
from .core import (
    DIMENSIONS,
    MetricScore,
    PromptRecord,
    ScoreReport,
    Suite,
    VideoAsset,
    load_suite,
    validate_suite,
)
from .providers import ProviderHub
from .static_quality import RRUB, score_aesthetic, score_technical
from .temporal import (
    TransitionParams,
    dynamic_degree,
    ground_event_clips,
    human_action_score,
    inter_event_consistency,
    intra_event_consistency,
    motion_smoothness,
    segment_tracks,
    semantic_consistency,
    temporal_flickering,
    transition_smoothness,
    warping_error,
)
from .video import AssetError, find_video, probe

logger = logging.getLogger(__name__)

CONSISTENCY_METRICS = (
    "intra_event_subject_consistency",
    "intra_event_background_consistency",
    "inter_event_subject_consistency",
    "inter_event_background_consistency",
)


def _dumps(value: Any) -> str:
    return json.dumps(value, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Artifacts:
    def __init__(self, root: Path | None):
        self.root = root

    def write(self, name: str, content: str | Any) -> None:
        if self.root is None:
            return
        atomic_write(self.root / name, content if isinstance(content, str) else _dumps(content))

    def dir(self, name: str) -> Path | None:
        return None if self.root is None else self.root / name


def _guarded(ids: tuple[str, ...], fn: Callable[[], Mapping[str, MetricScore]], sample_id: str) -> dict[str, MetricScore]:
    """Run a metric group; any ordinary exception becomes an error score for each id."""
    try:
        return dict(fn())
    except Exception as exc:  # noqa: BLE001 - isolation boundary: record and move on
        logger.warning("%s: %s failed: %s", sample_id, "/".join(ids), exc)
        return {m: MetricScore.error(m, f"{type(exc).__name__}: {exc}") for m in ids}


def evaluate_sample(
    record: PromptRecord,
    video: VideoAsset,
    hub: ProviderHub,
    cfg: Mapping[str, Any],
    artifact_dir: Path | None = None,
) -> ScoreReport:
    m = cfg["metrics"]
    rt = cfg["runtime"]
    attempts = int(rt.get("format_attempts", 3))
    side = rt.get("analysis_max_side")
    shots = cfg.get("few_shot") or {}
    art = _Artifacts(artifact_dir)
    sid = record.id
    scores: dict[str, MetricScore] = {}

    # static quality
    rr = m["rr_ub"]
    scores.update(_guarded(("aesthetic_quality",), lambda: {"aesthetic_quality": score_aesthetic(video, hub, RRUB(float(rr["value"]), 0, float(rr["top_fraction"])))}, sid))
    tq = m["technical"]
    scores.update(
        _guarded(
            ("technical_quality",),
            lambda: {"technical_quality": score_technical(video, hub, clip_max_s=float(tq["clip_max_s"]), provider_range=tuple(tq["provider_range"]))},
            sid,
        )
    )

    # text-video alignment
    def alignment() -> dict[str, MetricScore]:
        emb = TextEmbeddings(hub, sid)
        description = describe_video(video, hub, attempts=attempts)
        art.write("description.txt", description + "\n")
        out = {"overall_alignment": overall_alignment(description, record.prompt_base, emb)}
        generated = extract_events(description, hub, attempts=attempts, examples=shots, sample_id=sid)
        art.write("events_generated.json", [e.to_json() for e in generated])
        if not record.ground_truth_events:
            out["event_alignment"] = MetricScore.not_applicable("event_alignment", "record has no ground-truth events")
        else:
            matching, score, matrix = align_events(generated, record.ground_truth_events, emb)
            art.write("matching.json", matching_artifact(matching, matrix, score) + "\n")
            out["event_alignment"] = score
        return out

    scores.update(_guarded(DIMENSIONS["text_video_alignment"], alignment, sid))

    # temporal quality
    dd = m["dynamic_degree"]
    scores.update(
        _guarded(
            ("dynamic_degree",),
            lambda: {
                "dynamic_degree": dynamic_degree(
                    video,
                    hub,
                    stride=dd.get("stride"),
                    magnitude_threshold=dd.get("magnitude_threshold"),
                    relative_threshold=float(dd["relative_threshold"]),
                    top_fraction=float(dd["top_fraction"]),
                    min_dynamic_fraction=float(dd["min_dynamic_fraction"]),
                    max_side=side,
                )
            },
            sid,
        )
    )
    scores.update(_guarded(("motion_smoothness",), lambda: {"motion_smoothness": motion_smoothness(video, hub, max_triplets=m["motion_smoothness"].get("max_triplets"), max_side=side)}, sid))
    we = m["warping_error"]
    scores.update(
        _guarded(
            ("warping_error",),
            lambda: {"warping_error": warping_error(video, hub, occlusion_check=bool(we["occlusion_check"]), max_pairs=we.get("max_pairs"), max_side=side)},
            sid,
        )
    )
    scores.update(_guarded(("semantic_consistency",), lambda: {"semantic_consistency": semantic_consistency(video, hub, max_frames=int(m["semantic_consistency"]["max_frames"]), max_side=side)}, sid))
    scores.update(
        _guarded(
            ("temporal_flickering",),
            lambda: {"temporal_flickering": temporal_flickering(video, static_threshold=float(m["temporal_flickering"]["static_threshold"]), max_side=side)},
            sid,
        )
    )

    def transitions() -> dict[str, MetricScore]:
        t = m["transition"]
        params = TransitionParams(int(t["k"]), tuple(float(a) for a in t["alpha"]), float(t["b"]), float(t["c"]), float(t["range_floor"]))
        score, windows = transition_smoothness(video, hub, params, max_side=side)
        art.write("transitions.json", {"transitions": windows, "score": score.normalized})
        return {"transition_smoothness": score}

    scores.update(_guarded(("transition_smoothness",), transitions, sid))

    def actions() -> dict[str, MetricScore]:
        score, details = human_action_score(record, video, hub, attempts=attempts)
        art.write("human_actions.json", details)
        return {"human_action": score}

    scores.update(_guarded(("human_action",), actions, sid))

    def consistency() -> dict[str, MetricScore]:
        events = record.ground_truth_events
        if not events:
            return {k: MetricScore.not_applicable(k, "record has no ground-truth events") for k in CONSISTENCY_METRICS}
        ec = m["event_clips"]
        clips = ground_event_clips(video, events, hub)
        art.write("event_clips.json", [c.to_json() for c in clips])
        tracks = segment_tracks(video, clips, events, hub, frames_per_clip=int(ec["frames_per_clip"]), dilate_px=int(ec["dilate_px"]), max_side=side)
        if art.root is not None:
            tracks.save(art.dir("tracks"))
        return {
            "intra_event_subject_consistency": intra_event_consistency(tracks.subjects, clips),
            "intra_event_background_consistency": intra_event_consistency(tracks.background, clips, "intra_event_background_consistency"),
            "inter_event_subject_consistency": inter_event_consistency(tracks.subjects),
            "inter_event_background_consistency": inter_event_consistency(tracks.background, "inter_event_background_consistency"),
        }

    scores.update(_guarded(CONSISTENCY_METRICS, consistency, sid))

    # content clarity
    def clarity() -> dict[str, MetricScore]:
        log: list[dict[str, Any]] = []
        try:
            trials, diag = run_clarity_trials(video, hub, int(m["clarity"]["trials"]), attempts=attempts, examples=shots, transcript=log)
        except Exception:
            art.write("clarity_trials.json", {"outputs": log, "trials": []})
            raise
        art.write("clarity_trials.json", {"outputs": log, "trials": [t.to_json() for t in trials], "diagnostics": diag})
        _, per_dim = clarity_score(trials)
        return {k: MetricScore(v.metric_id, v.raw, v.normalized, v.status, {**v.diagnostics, **diag}) for k, v in per_dim.items()}

    scores.update(_guarded(DIMENSIONS["content_clarity"], clarity, sid))

    # HERD
    def herd() -> dict[str, MetricScore]:
        if not record.herd_questions:
            return {d: MetricScore.not_applicable(d, "record has no HERD questions") for d in DIMENSIONS["herd"]}
        responses = herd_answer(record, video, hub, attempts=attempts, examples=shots)
        headline, per_dim = herd_score(responses)
        art.write("herd_responses.json", {"responses": [r.to_json() for r in responses], "herd": headline.to_json()})
        return per_dim

    scores.update(_guarded(DIMENSIONS["herd"], herd, sid))
    return ScoreReport.build(sid, scores)


# ------------------------------------------------------------------- runs


def _fingerprint(record: PromptRecord, video: VideoAsset | None, cfg: Mapping[str, Any]) -> str:
    from .video import content_digest

    payload = {
        "record": record.to_json(),
        "video": content_digest(video) if video is not None else None,
        "config": public_view(cfg),
        "templates": {n: templates.get(n).version for n in templates.available()},
        "version": __version__,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode("utf-8")).hexdigest()


class Checkpoints:
    """One JSON file per finished sample; a fingerprint guards against stale reuse."""

    def __init__(self, root: Path):
        self.root = root
        self._lock = threading.Lock()

    def path(self, sample_id: str) -> Path:
        return self.root / f"{sample_id}.json"

    def load(self, sample_id: str, fingerprint: str) -> ScoreReport | None:
        try:
            body = json.loads(self.path(sample_id).read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        if body.get("fingerprint") != fingerprint:
            return None
        return ScoreReport.from_json(body["report"])

    def save(self, report: ScoreReport, fingerprint: str) -> None:
        with self._lock:
            atomic_write(self.path(report.sample_id), _dumps({"fingerprint": fingerprint, "report": report.to_json()}))


def conventions() -> dict[str, Any]:
    return {
        "score_scale": "normalized [0, 1]; tables show percent",
        "dimension_average": "unweighted mean of ok sub-dimensions",
        "method_average": "per-metric mean over ok samples, then unweighted mean per dimension",
        "spearman_ties": "average ranks",
        "kendall": "tau-b",
        "regression": "ordinary least squares",
    }


def build_method_report(
    method: str,
    suite: Suite,
    reports: list[ScoreReport],
    cfg: Mapping[str, Any],
    pairs: tuple[tuple[str, str], ...] = DEFAULT_CORRELATION_PAIRS,
) -> dict[str, Any]:
    summary = summarize(reports)
    try:
        by_category = group_by_category(reports, suite, (cfg.get("theme_categories") or None))
    except ValueError as exc:
        by_category = {"error": str(exc)}
    return {
        "method": method,
        "metadata": {
            "suite_version": suite.version,
            "package_version": __version__,
            "config": public_view(cfg),
            "conventions": conventions(),
            "templates": {n: templates.get(n).version for n in templates.available()},
        },
        "samples": [r.to_json() for r in reports],
        "metric_means": summary["metric_means"],
        "dimension_means": summary["dimension_means"],
        "overall_mean": summary["overall_mean"],
        "failed_samples": summary["failed_samples"],
        "by_category": by_category,
        "correlations": [{k: v for k, v in row.items() if k != "points"} for row in correlation_table(reports, pairs)],
    }


def run_evaluation(
    suite_path: str | Path,
    videos_dir: str | Path,
    cfg: Mapping[str, Any],
    out_path: str | Path,
    *,
    method: str | None = None,
    hub: ProviderHub | None = None,
) -> tuple[dict[str, Any], int]:
    """Evaluate every sample of a suite and write the method report.

    Returns the report and an exit code: 0 when every metric of every sample
    succeeded, 2 when some sample or metric recorded an error. Finished
    samples are checkpointed next to ``out_path`` and skipped on rerun.
    """
    suite = load_suite(suite_path)
    problems = validate_suite(suite, themes=cfg.get("themes"), questions_per_dimension=int(cfg["metrics"]["herd"]["questions_per_dimension"]))
    if problems:
        raise ValueError("suite failed validation: " + "; ".join(f"{k or '<suite>'}: {', '.join(v)}" for k, v in problems.items()))
    hub = hub or ProviderHub.from_config(cfg)
    out_path = Path(out_path)
    work = out_path.parent / f"{out_path.stem}.work"
    checkpoints = Checkpoints(work / "checkpoints")
    keep_artifacts = bool(cfg["runtime"].get("artifacts", True))
    exts = tuple(cfg["runtime"]["video_extensions"])

    def one(record: PromptRecord) -> ScoreReport:
        path = find_video(videos_dir, record.id, exts)
        video = None
        message = None
        if path is None:
            message = f"no video named {record.id}{{{','.join(exts)}}} in {Path(videos_dir).name}"
        else:
            try:
                video = probe(path, record.id)
            except AssetError as exc:
                message = str(exc)
        fp = _fingerprint(record, video, cfg)
        cached = checkpoints.load(record.id, fp)
        if cached is not None:
            logger.info("%s: resumed from checkpoint", record.id)
            return cached
        if video is None:
            report = ScoreReport.failed(record.id, message or "video unavailable")
        else:
            logger.info("%s: evaluating", record.id)
            report = evaluate_sample(record, video, hub, cfg, work / "artifacts" / record.id if keep_artifacts else None)
        checkpoints.save(report, fp)
        return report

    workers = int(cfg["runtime"].get("workers", 1))
    if workers <= 1:
        reports = [one(r) for r in suite.samples]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, suite.samples))

    report = build_method_report(method or Path(videos_dir).name, suite, reports, cfg)
    atomic_write(out_path, _dumps(report))
    partial = any(r.error is not None or any(s.status.value == "error" for s in r.metrics.values()) for r in reports)
    return report, 2 if partial else 0


def load_reports(report: Mapping[str, Any]) -> list[ScoreReport]:
    return [ScoreReport.from_json(s) for s in report.get("samples", [])]

