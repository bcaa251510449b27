"""Versioned prompt templates.

Each template file starts with a `#! version:` header followed by [system]
and [user] sections. User sections use <<name>> placeholders instead of
str.format so JSON examples inside prompts need no escaping. Reports embed
prompt_version_hash(), so judged numbers are only comparable within one
prompt version.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources

__all__ = ["PromptTemplate", "load_prompt", "prompt_version_hash", "PROMPT_NAMES"]

PROMPT_NAMES = [
    "question_gen",
    "hit_judge",
    "quality_judge",
    "answer",
    "summarize",
    "router",
    "synthesis",
]

_PLACEHOLDER_RE = re.compile(r"<<([a-z_]+)>>")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    version: str
    system: str
    user: str

    def render_user(self, **values: str) -> str:
        def sub(match: re.Match) -> str:
            key = match.group(1)
            if key not in values:
                raise KeyError(f"prompt {self.name!r} is missing value for <<{key}>>")
            return values[key]

        return _PLACEHOLDER_RE.sub(sub, self.user)


def _read(name: str) -> str:
    return (resources.files(__package__) / f"{name}.txt").read_text(encoding="utf-8")


def load_prompt(name: str) -> PromptTemplate:
    raw = _read(name)
    lines = raw.splitlines()
    if not lines or not lines[0].startswith("#! version:"):
        raise ValueError(f"prompt {name!r} lacks a version header")
    version = lines[0].split(":", 1)[1].strip()
    section = None
    parts: dict[str, list[str]] = {"system": [], "user": []}
    for line in lines[1:]:
        if line.strip() == "[system]":
            section = "system"
        elif line.strip() == "[user]":
            section = "user"
        elif section:
            parts[section].append(line)
    system = "\n".join(parts["system"]).strip()
    user = "\n".join(parts["user"]).strip()
    if not system or not user:
        raise ValueError(f"prompt {name!r} must define [system] and [user] sections")
    return PromptTemplate(name=name, version=version, system=system, user=user)


def prompt_version_hash() -> str:
    """Stable 12-hex digest over every template file."""
    digest = hashlib.sha256()
    for name in PROMPT_NAMES:
        digest.update(name.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(_read(name).encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()[:12]
