"""Template-driven model calls with output validation and re-asking.

Each re-ask carries an ``attempt`` index in the request params, so it gets its
own cache entry: a rerun replays the same sequence of bad and good outputs
instead of being stuck on a cached bad one.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, Mapping, Sequence, TypeVar

from . import templates
from .core import VideoAsset
from .providers import ExtractionError, ProviderHub, ProviderKind, parse_json_block

logger = logging.getLogger(__name__)

T = TypeVar("T")


class FormatError(ValueError):
    """Model output parsed but did not satisfy the expected structure."""


def build_request(
    template: str,
    inputs: Mapping[str, str],
    *,
    video: VideoAsset | None = None,
    examples: Mapping[str, Sequence[str]] | None = None,
    params: Mapping[str, Any] | None = None,
    extra: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    tpl = templates.get(template)
    req: dict[str, Any] = {
        "prompt": tpl.render((examples or {}).get(template), **inputs),
        "template": template,
        "template_version": tpl.version,
        "inputs": dict(inputs),
        "params": dict(params or {}),
    }
    if video is not None:
        req["video"] = video
    if extra:
        req.update(extra)
    return req


def ask(
    hub: ProviderHub,
    kind: ProviderKind,
    template: str,
    inputs: Mapping[str, str],
    parse: Callable[[str], T],
    *,
    attempts: int = 3,
    video: VideoAsset | None = None,
    examples: Mapping[str, Sequence[str]] | None = None,
    params: Mapping[str, Any] | None = None,
    extra: Mapping[str, Any] | None = None,
    sample_id: str | None = None,
    transcript: list[dict[str, Any]] | None = None,
) -> T:
    """Invoke ``template`` until ``parse`` accepts the output.

    ``parse`` raises ``FormatError``/``ExtractionError``/``ValueError`` to
    reject an output. Raw outputs are appended to ``transcript`` when given.
    """
    last: Exception | None = None
    for attempt in range(max(1, attempts)):
        req = build_request(
            template,
            inputs,
            video=video,
            examples=examples,
            params={**(params or {}), "attempt": attempt},
            extra=extra,
        )
        text = hub.invoke(kind, req, sample_id=sample_id)
        try:
            value = parse(text)
        except (ExtractionError, ValueError, KeyError, TypeError) as exc:
            last = exc
            if transcript is not None:
                transcript.append({"attempt": attempt, "raw": text, "error": str(exc)})
            logger.info("%s output rejected (attempt %d): %s", template, attempt + 1, exc)
            continue
        if transcript is not None:
            transcript.append({"attempt": attempt, "raw": text})
        return value
    raise ExtractionError(f"{template}: no acceptable output after {attempts} attempts: {last}")


def ask_json(hub: ProviderHub, kind: ProviderKind, template: str, inputs: Mapping[str, str], check: Callable[[Any], T], **kwargs: Any) -> T:
    return ask(hub, kind, template, inputs, lambda text: check(parse_json_block(text)), **kwargs)
