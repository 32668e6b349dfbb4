"""Deterministic stand-ins for every provider role.

Mocks are pure functions of their request and params, so an evaluation run
with mocks is reproducible bit for bit. They make no attempt at semantic
realism beyond what is needed to produce well-formed outputs; fixtures can
override any of them through lookup tables in ``params``.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import Any, Callable, Mapping

import cv2
import numpy as np

from ..video import VideoReader, content_digest
from .base import ProviderKind
from .local import content_cuts

DEFAULT_PARAGRAPH = (
    "A person walks along a quiet beach at sunrise while the camera slowly pans to follow them. "
    "Waves roll onto the sand and the sky turns from pink to gold. "
    "The person stops, looks at the horizon, and the camera zooms in on their face."
)

_HUMAN_WORDS = {
    "man", "woman", "person", "boy", "girl", "child", "chef", "people", "men", "women",
    "worker", "player", "dancer", "driver", "rider", "cook", "baker", "farmer", "artist",
    "vlogger", "host", "teacher", "student", "athlete", "musician", "couple", "family",
}
_NEGATIVE_CUES = ("lack", "fail", "not ", "n't", "unclear", "confus", "rushed", "absent", "without", "missing", "weak", "poor")


def _h(*parts: Any) -> int:
    payload = json.dumps(parts, sort_keys=True, default=str).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def _sentences(text: str) -> list[str]:
    return [s.strip() for s in re.split(r"(?<=[.!?])\s+", text.strip()) if s.strip()]


def _words(text: str) -> list[str]:
    return re.findall(r"[a-z']+", text.lower())


def bag_of_words(text: str, dim: int = 128) -> np.ndarray:
    vec = np.zeros(dim)
    for w in _words(text):
        vec[_h("w", w) % dim] += 1.0
    vec[-1] += 1e-3  # keeps the empty string embeddable
    return vec


def text_embedder(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    table = params.get("vectors") or {}
    if request["text"] in table:
        return table[request["text"]]
    return bag_of_words(request["text"], int(params.get("dim", 128)))


def frame_embedder(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    image = request["image"]
    table = params.get("vectors") or {}
    if table:
        key = hashlib.sha256(np.ascontiguousarray(image).tobytes()).hexdigest()
        if key in table:
            return table[key]
    side = int(params.get("thumb", 4))
    thumb = cv2.resize(image, (side, side), interpolation=cv2.INTER_AREA).astype(np.float64)
    return np.concatenate([(thumb.ravel() - 127.5) / 127.5, [0.5]])


def _subject_of(sentence: str) -> str:
    words = _words(sentence)
    for i, w in enumerate(words):
        if w in _HUMAN_WORDS:
            return w
    return ""


def _events_from_text(text: str) -> list[dict[str, str]]:
    events = []
    for s in _sentences(text):
        words = _words(s)
        camera = next((c for c in ("pan", "zoom", "track", "tilt", "dolly") if any(w.startswith(c) for w in words)), "")
        events.append({
            "event": s,
            "subject": _subject_of(s),
            "setting": " ".join(words[-3:]),
            "action": " ".join(words[1:4]),
            "camera motion": camera or "static",
        })
    return events


def _clarity_json(seed: int, fixed: Any) -> str:
    names = ["Theme Clarity", "Logical Structure", "Information Completeness", "Information Consistency"]
    scores = list(fixed) if fixed is not None else [(seed >> (3 * i)) % 5 for i in range(4)]
    body = {n: {"score": int(s), "reason": f"Mock rationale for {n.lower()}."} for n, s in zip(names, scores)}
    return "```json\n" + json.dumps(body, indent=2) + "\n```"


def video_describer(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    template = request.get("template", "describe")
    responses = params.get("responses") or {}
    if template in responses:
        return responses[template]
    if template == "clarity":
        seed = _h(content_digest(request["video"]))
        return _clarity_json(seed, params.get("clarity_scores"))
    if template == "self_refine_critique":
        return "NO ISSUES"
    if template == "self_refine_revise":
        return request.get("inputs", {}).get("draft_text", DEFAULT_PARAGRAPH)
    return params.get("paragraph", DEFAULT_PARAGRAPH)


def question_answerer(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    question = request.get("question", request["prompt"])
    answers = params.get("answers") or {}
    if question in answers:
        return answers[question]
    if "default" in params:
        return params["default"]
    choices = params.get("choices", ["Yes", "No", "Yes", "Unclear"] if request.get("template") == "herd_answer" else ["Yes", "No"])
    return choices[_h(content_digest(request["video"]), question) % len(choices)]


def scene_detector(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    if "cuts" in params:
        return list(params["cuts"])
    return content_cuts(request["video"], params)


def flow_estimator(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    h, w = request["frame_a"].shape[:2]
    dx, dy = params.get("constant", (0.0, 0.0))
    flow = np.empty((h, w, 2), dtype=np.float32)
    flow[..., 0] = dx
    flow[..., 1] = dy
    return flow


def frame_interpolator(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    a, b = request["frame_a"], request["frame_b"]
    if params.get("mode") == "black":
        return np.zeros_like(a)
    if params.get("mode") == "first":
        return a.copy()
    mid = (a.astype(np.float64) + b.astype(np.float64)) / 2.0
    return np.clip(np.floor(mid + 0.5), 0, 255).astype(np.uint8)


def segmenter(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    label = request["text"].strip().lower()
    if not label or label in {a.lower() for a in params.get("absent", ())}:
        return None
    image = request["image"].astype(np.int16)
    border = np.concatenate([image[0], image[-1], image[:, 0], image[:, -1]])
    bg = np.median(border, axis=0)
    mask = np.abs(image - bg).max(axis=-1) > int(params.get("threshold", 24))
    return mask if mask.any() else None


def temporal_grounder(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    spans = params.get("spans") or {}
    return spans.get(request["text"])


def aesthetic_scorer(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    if "value" in params:
        return params["value"]
    gray = cv2.cvtColor(request["image"], cv2.COLOR_RGB2GRAY).astype(np.float64)
    return float(1.0 + 9.0 * min(1.0, gray.std() / 80.0))


def technical_scorer(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    if "value" in params:
        return params["value"]
    video = request["video"]
    start, end = request["start_frame"], request["end_frame"]
    idx = sorted({start, (start + end - 1) // 2, end - 1})
    frames = VideoReader(video).read(idx)
    sharp = [cv2.Laplacian(cv2.cvtColor(f, cv2.COLOR_RGB2GRAY), cv2.CV_64F).var() for f in frames]
    return float(1.0 - np.exp(-np.mean(sharp) / 200.0))


def _text_llm(request: Mapping[str, Any], params: Mapping[str, Any]) -> Any:
    template = request.get("template", "")
    inputs = request.get("inputs") or {}
    responses = params.get("responses") or {}
    if template in responses:
        resp = responses[template]
        return resp if isinstance(resp, str) else json.dumps(resp)

    if template == "complexity":
        text = inputs.get("prompt_text", request["prompt"])
        fixed = params.get("scores")
        scores = list(fixed) if fixed else [1 + _h(text, k) % 10 for k in ("sem", "str", "ctl")]
        keys = ("semantic_complexity", "structural_complexity", "control_complexity")
        return json.dumps({k: {"score": s, "explanation": "mock"} for k, s in zip(keys, scores)})
    if template == "event_extraction":
        return "```json\n" + json.dumps(_events_from_text(inputs.get("description_text", "")), indent=2) + "\n```"
    if template == "human_action_extraction":
        out = []
        for s in _sentences(inputs.get("prompt_text", "")):
            words = _words(s)
            for i, w in enumerate(words):
                if w in _HUMAN_WORDS and i + 1 < len(words):
                    out.append({"subject": w, "action": " ".join(words[i + 1 : i + 4])})
                    break
        return json.dumps(out)
    if template == "herd_dimension_extraction":
        from ..core import HERD_DIMENSIONS

        sents = _sentences(inputs.get("evaluation_text", "")) or [""]
        titles = [d.replace("-", " ").title() for d in HERD_DIMENSIONS]
        return json.dumps({t: sents[i % len(sents)] for i, t in enumerate(titles)})
    if template == "herd_question_generation":
        evals = json.loads(inputs.get("evaluation_text", "{}"))
        slot = int(params.get("slot", 0))
        openers = ["Does the video", "Did the video", "Would a viewer say the video", "Does the footage", "Did the clip", "Is it true that the video"]
        out = {}
        for dim, text in evals.items():
            gist = " ".join(_words(text)[:6]) or dim.lower()
            neg = (_h(dim, slot, text) % 3) == 0
            verb = "fail to convey" if neg else "convey"
            out[dim] = f"{openers[slot % len(openers)]} {verb} {gist}?"
        return json.dumps(out)
    if template == "herd_polarity":
        q = inputs.get("question_text", "").lower()
        return "negative" if any(c in q for c in _NEGATIVE_CUES) else "positive"
    if template == "event_split":
        events = json.loads(inputs.get("events_json", "[]"))
        subs = []
        for ev in events:
            subj = ev.get("subject") or "The scene"
            subs.append(f"{subj}: {ev.get('event', '')} Camera: {ev.get('camera motion', 'static')}.")
        return json.dumps(subs)
    return params.get("text", "OK")


BACKENDS: dict[ProviderKind, Callable[[Mapping[str, Any], Mapping[str, Any]], Any]] = {
    ProviderKind.TEXT_EMBEDDER: text_embedder,
    ProviderKind.FRAME_EMBEDDER: frame_embedder,
    ProviderKind.VIDEO_DESCRIBER: video_describer,
    ProviderKind.QUESTION_ANSWERER: question_answerer,
    ProviderKind.SCENE_DETECTOR: scene_detector,
    ProviderKind.FLOW_ESTIMATOR: flow_estimator,
    ProviderKind.FRAME_INTERPOLATOR: frame_interpolator,
    ProviderKind.SEGMENTER: segmenter,
    ProviderKind.TEMPORAL_GROUNDER: temporal_grounder,
    ProviderKind.AESTHETIC_SCORER: aesthetic_scorer,
    ProviderKind.TECHNICAL_SCORER: technical_scorer,
    ProviderKind.COMPLEXITY_JUDGE: _text_llm,
    ProviderKind.TEXT_LLM: _text_llm,
}
