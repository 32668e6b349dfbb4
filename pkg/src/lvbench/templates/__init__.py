"""Versioned prompt templates.

Each template lives in a ``.txt`` file next to this module. Its version is a
short content hash, which is folded into provider cache keys so that editing
a template invalidates cached responses produced with the old text.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

_EXAMPLE = re.compile(r"\[Example (\d+)\]")


@dataclass(frozen=True)
class Template:
    name: str
    text: str

    @property
    def version(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:12]

    @property
    def fields(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(re.findall(r"\{([a-z_]+)\}", self.text)))

    def render(self, examples: Sequence[str] | None = None, **values: str) -> str:
        """Fill ``{field}`` placeholders and ``[Example N]`` few-shot slots.

        Plain replacement is used because the templates contain literal JSON
        braces. Unfilled example slots are dropped.
        """
        missing = [f for f in self.fields if f not in values]
        if missing:
            raise KeyError(f"template {self.name!r} needs {missing}")
        out = self.text
        for key, val in values.items():
            out = out.replace("{" + key + "}", str(val))
        examples = list(examples or ())

        def fill(m: re.Match[str]) -> str:
            i = int(m.group(1)) - 1
            return examples[i] if i < len(examples) else "(omitted)"

        return _EXAMPLE.sub(fill, out)


@lru_cache(maxsize=None)
def get(name: str) -> Template:
    text = resources.files(__name__).joinpath(f"{name}.txt").read_text(encoding="utf-8")
    return Template(name, text)


def available() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".txt"))


def render(name: str, examples: Mapping[str, Sequence[str]] | None = None, **values: str) -> str:
    return get(name).render((examples or {}).get(name), **values)
