"""Prompt template assets.

Templates are plain text files under ``vrefine/templates`` with
``str.format`` placeholders ({intent_text}, {program_source}, {mode},
{has_images}, ...).  The set can be overridden with a directory of
same-named files (CLI ``--templates``), keeping prompts auditable and
versioned outside the code.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

_ASSET_DIR = resources.files(__package__) / "templates"

TEMPLATE_NAMES = (
    "generator_tweak_vision",
    "generator_tweak_text",
    "generator_leap_vision",
    "generator_leap_text",
    "evaluator_vision",
    "evaluator_text",
    "expand_intent",
)


class _SafeDict(dict):
    def __missing__(self, key):
        return "{" + key + "}"


@dataclass(frozen=True)
class TemplateSet:
    templates: dict

    def render(self, name: str, **values) -> str:
        text = self.templates[name].format_map(_SafeDict(values))
        if not text.strip():
            raise ValueError(f"template {name!r} rendered empty")
        return text


def load_templates(override_dir: Optional[str] = None) -> TemplateSet:
    templates = {}
    for name in TEMPLATE_NAMES:
        templates[name] = (_ASSET_DIR / f"{name}.txt").read_text(encoding="utf-8")
    if override_dir:
        for path in Path(override_dir).glob("*.txt"):
            templates[path.stem] = path.read_text(encoding="utf-8")
    return TemplateSet(templates=templates)
