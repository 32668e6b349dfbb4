"""Text-video alignment: whole-description similarity and order-aware event matching."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from .core import EventSpec, MetricScore, SimilarityMatrix, VideoAsset, clamp01, mean
from .prompting import FormatError, ask, ask_json
from .providers import ProviderHub, ProviderKind

FIELDS = ("subject", "setting", "action", "camera")
_TIE_TOL = 1e-9


# ---------------------------------------------------------------- embedding


class TextEmbeddings:
    """Per-call memo over the text embedder so repeated strings cost one lookup."""

    def __init__(self, hub: ProviderHub, sample_id: str | None = None):
        self.hub = hub
        self.sample_id = sample_id
        self._memo: dict[str, np.ndarray] = {}

    def __call__(self, text: str) -> np.ndarray:
        if text not in self._memo:
            vec = self.hub.invoke(ProviderKind.TEXT_EMBEDDER, {"text": text}, sample_id=self.sample_id)
            self._memo[text] = np.asarray(vec, dtype=np.float64)
        return self._memo[text]

    def cosine(self, a: str, b: str) -> float:
        return float(np.dot(self(a), self(b)))


def _embedder(hub_or_emb: ProviderHub | TextEmbeddings) -> TextEmbeddings:
    return hub_or_emb if isinstance(hub_or_emb, TextEmbeddings) else TextEmbeddings(hub_or_emb)


# ------------------------------------------------------------ description


_LIST_LINE = re.compile(r"^\s*(?:[-*•]|\d+[.)]|#+)\s+")


def check_paragraph(text: str) -> str:
    """Accept a single prose paragraph; reject lists, headings and multi-paragraph output."""
    body = text.strip()
    if not body:
        raise FormatError("empty description")
    lines = body.splitlines()
    if any(_LIST_LINE.match(line) for line in lines):
        raise FormatError("description contains list or heading markup")
    if re.search(r"\n\s*\n", body):
        raise FormatError("description spans several paragraphs")
    return " ".join(line.strip() for line in lines)


def describe_video(video: VideoAsset, hub: ProviderHub, *, attempts: int = 3, transcript: list[dict[str, Any]] | None = None) -> str:
    return ask(
        hub,
        ProviderKind.VIDEO_DESCRIBER,
        "describe",
        {},
        check_paragraph,
        video=video,
        attempts=attempts,
        sample_id=video.sample_id,
        transcript=transcript,
    )


def overall_alignment(description: str, prompt_base: str, hub: ProviderHub | TextEmbeddings) -> MetricScore:
    if not description.strip() or not prompt_base.strip():
        raise ValueError("description and prompt_base must be nonempty")
    cos = _embedder(hub).cosine(description, prompt_base)
    return MetricScore("overall_alignment", cos, clamp01(cos))


# ----------------------------------------------------------------- events


def _check_events(value: Any) -> list[EventSpec]:
    if not isinstance(value, list):
        raise FormatError(f"expected a JSON array of events, got {type(value).__name__}")
    events = []
    for i, item in enumerate(value):
        if not isinstance(item, Mapping):
            raise FormatError(f"event {i} is not an object")
        ev = EventSpec.from_json(item)
        # models pad fields and sometimes leave the camera blank
        ev = EventSpec(*(getattr(ev, f).strip() for f in ("event", "subject", "setting", "action", "camera_motion")))
        if not ev.camera_motion:
            ev = replace(ev, camera_motion="static")
        if not ev.event:
            raise FormatError(f"event {i} has an empty description")
        events.append(ev)
    return events


def extract_events(
    text: str,
    hub: ProviderHub,
    *,
    attempts: int = 3,
    examples: Mapping[str, Sequence[str]] | None = None,
    sample_id: str | None = None,
    transcript: list[dict[str, Any]] | None = None,
) -> list[EventSpec]:
    if not text.strip():
        raise ValueError("text must be nonempty")
    return ask_json(
        hub,
        ProviderKind.TEXT_LLM,
        "event_extraction",
        {"description_text": text},
        _check_events,
        attempts=attempts,
        examples=examples,
        sample_id=sample_id,
        transcript=transcript,
    )


def build_similarity_matrix(
    generated: Sequence[EventSpec], ground_truth: Sequence[EventSpec], hub: ProviderHub | TextEmbeddings
) -> SimilarityMatrix:
    emb = _embedder(hub)
    rows = [[emb.cosine(g.event, t.event) for t in ground_truth] for g in generated]
    return SimilarityMatrix.from_rows(rows, cols=len(ground_truth))


def field_similarity(gen: EventSpec, gt: EventSpec, hub: ProviderHub | TextEmbeddings) -> dict[str, float]:
    emb = _embedder(hub)
    out = {}
    for name, a, b in (
        ("subject", gen.subject, gt.subject),
        ("setting", gen.setting, gt.setting),
        ("action", gen.action, gt.action),
        ("camera", gen.camera_motion, gt.camera_motion),
    ):
        a, b = a.strip(), b.strip()
        if not a and not b:
            out[name] = 1.0
        elif not a or not b:
            out[name] = 0.0
        else:
            out[name] = clamp01(emb.cosine(a, b))
    return out


# --------------------------------------------------------------- matching


def _hungarian_min(cost: np.ndarray) -> np.ndarray:
    """Min-cost assignment of every row of an n x m cost matrix (n <= m).

    Shortest augmenting path with potentials, O(n^2 m). Returns the column
    assigned to each row.
    """
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)  # p[j]: 1-based row matched to column j (0 = free)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = np.flatnonzero(~used[1:]) + 1
            cur = cost[i0 - 1, free - 1] - u[i0] - v[free]
            better = cur < minv[free]
            minv[free[better]] = cur[better]
            way[free[better]] = j0
            j1 = int(free[np.argmin(minv[free])])
            delta = minv[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = np.empty(n, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            cols[p[j] - 1] = j - 1
    return cols


def max_weight_assignment(weights: np.ndarray) -> tuple[float, dict[int, int]]:
    """Optimal total weight and a row -> column map of cardinality min(rows, cols)."""
    r, c = weights.shape
    if r == 0 or c == 0:
        return 0.0, {}
    if r <= c:
        cols = _hungarian_min(-weights)
        assign = {i: int(cols[i]) for i in range(r)}
    else:
        rows = _hungarian_min(-weights.T)
        assign = {int(rows[j]): j for j in range(c)}
    return float(sum(weights[i, j] for i, j in assign.items())), assign


def match_events(matrix: SimilarityMatrix | Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Maximum-weight matching of size min(rows, cols) with lexicographic tie-breaking.

    Among all optimal matchings, the one whose (gen, gt) pair sequence sorted
    by gen index is lexicographically smallest is returned. Rows are fixed in
    order: each takes the smallest column that still admits an optimal
    completion of the remaining rows and columns, or stays unmatched if no
    column does.
    """
    values = matrix.values if isinstance(matrix, SimilarityMatrix) else matrix
    w = np.array(values, dtype=np.float64).reshape(len(values), -1 if len(values) else 0)
    r, c = w.shape
    if r == 0 or c == 0:
        return []
    target, known = max_weight_assignment(w)
    rows_left = list(range(r))
    cols_left = list(range(c))
    pairs: list[tuple[int, int]] = []
    for i in range(r):
        if not cols_left:
            break
        rows_left.remove(i)
        chosen = None
        for j in cols_left:
            rest_cols = [y for y in cols_left if y != j]
            if known.get(i) == j:
                chosen, rest_known = j, {a: b for a, b in known.items() if a != i}
                break
            sub_val, sub = max_weight_assignment(w[np.ix_(rows_left, rest_cols)])
            if abs(w[i, j] + sub_val - target) <= _TIE_TOL:
                chosen = j
                rest_known = {rows_left[a]: rest_cols[b] for a, b in sub.items()}
                break
        if chosen is None:
            # row i is unmatched in every optimal completion; known stays valid
            continue
        pairs.append((i, chosen))
        cols_left.remove(chosen)
        target -= w[i, chosen]
        known = rest_known
    return pairs


def count_inversions(seq: Sequence[int]) -> int:
    """Pairs (a, b) with a < b and seq[a] > seq[b], by merge sort in O(n log n)."""

    def sort(xs: list[int]) -> tuple[list[int], int]:
        if len(xs) <= 1:
            return xs, 0
        mid = len(xs) // 2
        left, a = sort(xs[:mid])
        right, b = sort(xs[mid:])
        merged: list[int] = []
        inv = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                inv += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, inv

    return sort(list(seq))[1]


# ------------------------------------------------------------------ score


@dataclass(frozen=True)
class MatchedPair:
    gen_index: int
    gt_index: int
    semantic_sim: float
    field_sims: Mapping[str, float]

    @property
    def field_mean(self) -> float:
        return mean(self.field_sims[f] for f in FIELDS)

    def to_json(self) -> dict[str, Any]:
        return {
            "gen_index": self.gen_index,
            "gt_index": self.gt_index,
            "semantic_sim": self.semantic_sim,
            "field_sims": {f: self.field_sims[f] for f in FIELDS},
        }


@dataclass(frozen=True)
class EventMatching:
    pairs: tuple[MatchedPair, ...]
    inversions: int
    max_inversions: int
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Sequence[MatchedPair]) -> EventMatching:
        ordered = tuple(sorted(pairs, key=lambda p: p.gen_index))
        gens = [p.gen_index for p in ordered]
        gts = [p.gt_index for p in ordered]
        if len(set(gens)) != len(gens) or len(set(gts)) != len(gts):
            raise ValueError("pairs do not form a matching")
        n = len(ordered)
        return cls(ordered, count_inversions(gts), n * (n - 1) // 2)

    def to_json(self) -> dict[str, Any]:
        return {
            "pairs": [p.to_json() for p in self.pairs],
            "inversions": self.inversions,
            "max_inversions": self.max_inversions,
        }


def event_alignment_score(matching: EventMatching) -> MetricScore:
    """Order-penalized mean of semantic x field-mean similarity over matched pairs."""
    n = len(matching.pairs)
    if n == 0:
        return MetricScore("event_alignment", 0.0, 0.0, diagnostics={"note": "no events matched"})
    for p in matching.pairs:
        for v in (p.semantic_sim, *(p.field_sims[f] for f in FIELDS)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"similarity {v} outside [0, 1]")
    quality = mean(p.semantic_sim * p.field_mean for p in matching.pairs)
    penalty = 1.0 if n <= 1 else 1.0 - matching.inversions / matching.max_inversions
    score = penalty * quality
    return MetricScore(
        "event_alignment",
        score,
        clamp01(score),
        diagnostics={
            "matched": n,
            "inversions": matching.inversions,
            "max_inversions": matching.max_inversions,
            "order_factor": penalty,
            "unpenalized": quality,
        },
    )


def align_events(
    generated: Sequence[EventSpec], ground_truth: Sequence[EventSpec], hub: ProviderHub | TextEmbeddings
) -> tuple[EventMatching, MetricScore, SimilarityMatrix]:
    """Similarity matrix, optimal matching, field similarities and the final score."""
    emb = _embedder(hub)
    matrix = build_similarity_matrix(generated, ground_truth, emb)
    pairs = [
        MatchedPair(i, j, matrix.values[i][j], field_similarity(generated[i], ground_truth[j], emb))
        for i, j in match_events(matrix)
    ]
    matching = EventMatching.from_pairs(pairs)
    score = event_alignment_score(matching)
    diag = {**score.diagnostics, "generated_events": len(generated), "ground_truth_events": len(ground_truth)}
    return matching, MetricScore(score.metric_id, score.raw, score.normalized, score.status, diag), matrix


def matching_artifact(matching: EventMatching, matrix: SimilarityMatrix, score: MetricScore) -> str:
    body = {
        **matching.to_json(),
        "similarity_matrix": [list(r) for r in matrix.values],
        "score": score.normalized,
    }
    return json.dumps(body, indent=2, sort_keys=True)
