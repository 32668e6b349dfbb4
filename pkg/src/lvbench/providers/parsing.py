"""Helpers for turning free-form model output into structured values."""

from __future__ import annotations

import json
import logging
import re
from typing import Any

logger = logging.getLogger(__name__)

_FENCE = re.compile(r"```[ \t]*([A-Za-z0-9_-]*)[ \t]*\r?\n?(.*?)```", re.DOTALL)
_decoder = json.JSONDecoder()


class ExtractionError(ValueError):
    """No JSON value could be recovered from model output."""


def _first_json_value(text: str) -> tuple[bool, Any]:
    for i, ch in enumerate(text):
        if ch not in "[{":
            continue
        try:
            value, _ = _decoder.raw_decode(text, i)
        except json.JSONDecodeError:
            continue
        return True, value
    return False, None


def parse_json_block(llm_text: str) -> Any:
    """Return the first well-formed JSON array/object in ``llm_text``.

    Fenced blocks are tried first (in order), then the whole text. Models
    often emit prose around the payload, so leading text is skipped.
    """
    if llm_text is None:
        raise ExtractionError("no text")
    stripped = llm_text.strip()
    for match in _FENCE.finditer(stripped):
        body = match.group(2).strip()
        try:
            return json.loads(body)
        except json.JSONDecodeError:
            found, value = _first_json_value(body)
            if found:
                return value
    # an unterminated fence ("```json\n[...]" without closing) is common too
    found, value = _first_json_value(stripped)
    if found:
        return value
    logger.warning("no JSON found in model output: %r", llm_text[:500])
    raise ExtractionError(f"no parseable JSON in output: {llm_text[:200]!r}")


_LEADING = re.compile(r"[\W_]*(?:answer\s*:\s*[\W_]*)?([a-z]+)")


def canonical_answer(text: str, allowed: tuple[str, ...] = ("yes", "no")) -> str | None:
    """Lowercase, drop punctuation, and accept only a leading allowed token."""
    m = _LEADING.match(text.lower())
    if m is None:
        return None
    token = m.group(1)
    return token if token in allowed else None
