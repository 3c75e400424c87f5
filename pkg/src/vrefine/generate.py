"""Edit generation: propose b program variants of the incumbent.

Two production backends: a deterministic mutation backend for offline
runs (tweak/leap edits from the DSL mutators) and a chat-VLM backend.
Proposals are addressed by (slot, attempt) so the engine can request a
fresh sample for one slot during rejection sampling; mock proposals are
a pure function of (incumbent source, backend seed, mode, slot, attempt).
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from . import dsl
from .errors import BackendError
from .rng import fnv1a64, mix64
from .templates import TemplateSet, load_templates
from .types import Intent, Program, VisualState
from .vlm import ChatClient, image_part, text_part, user_message

_MODE_SALT = {"tweak": 0x7457, "leap": 0x4C50}

_KIND_FOR_DOMAIN = {"toy_texture": dsl.KIND_TEXTURE, "toy_post": dsl.KIND_POST}

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_code(response: str) -> str:
    """Body of the first fenced code block, else the whole reply trimmed."""
    m = _FENCE_RE.search(response)
    return m.group(1).strip() if m else response.strip()


class MockMutationGenerator:
    """Seeded DSL mutations standing in for a VLM edit generator."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def propose_one(self, p_best: Program, s_best: Optional[VisualState],
                    intent: Intent, mode: str, slot: int, attempt: int = 0) -> str:
        kind = _KIND_FOR_DOMAIN.get(p_best.domain_tag)
        if kind is None:
            raise BackendError(
                f"mock generator only mutates toy programs, got {p_best.domain_tag!r}")
        ast = dsl.parse(p_best.source, kind=kind)
        slot_seed = mix64(self.seed, fnv1a64(p_best.source),
                          _MODE_SALT[mode], slot, attempt)
        if mode == "tweak":
            return dsl.mutate_tweak(ast, slot_seed)
        return dsl.mutate_leap(ast, slot_seed)

    def expand(self, intent: Intent) -> str:
        return intent.text


class AdversarialGenerator:
    """Test backend that only proposes flat extreme-color programs.

    Useful for demonstrating divergence when reversion is disabled: every
    proposal is a constant poster color, far from any textured target.
    """

    PALETTE = ("rgb(0, 0, 0)", "rgb(1, 1, 1)", "rgb(1, 0, 0)", "rgb(0, 1, 0)",
               "rgb(0, 0, 1)", "rgb(1, 0, 1)", "rgb(1, 1, 0)", "rgb(0, 1, 1)")

    def __init__(self, seed: int = 0):
        self.seed = seed

    def propose_one(self, p_best: Program, s_best, intent: Intent, mode: str,
                    slot: int, attempt: int = 0) -> str:
        index = mix64(self.seed, slot, attempt) % len(self.PALETTE)
        return f"output {self.PALETTE[index]}"

    def expand(self, intent: Intent) -> str:
        return intent.text


class VlmChatGenerator:
    """Chat-VLM edit generator.

    With vision enabled the prompt interleaves the current render and the
    intent's guide images; without it (the generator-vision ablation) the
    model sees program text and intent text only.  Image-grounded
    templates walk the model through difference enumeration, line
    localization, then code emission.
    """

    def __init__(self, client: Optional[ChatClient] = None,
                 vision_enabled: bool = True, temperature: float = 0.7,
                 templates: Optional[TemplateSet] = None):
        self.client = client or ChatClient()
        self.vision_enabled = vision_enabled
        self.temperature = temperature
        self.templates = templates or load_templates()

    def propose_one(self, p_best: Program, s_best: Optional[VisualState],
                    intent: Intent, mode: str, slot: int, attempt: int = 0) -> str:
        messages = self._messages(p_best, s_best, intent, mode)
        response = self.client.complete(messages, temperature=self.temperature)
        return extract_code(response)

    def _messages(self, p_best, s_best, intent, mode) -> list[dict]:
        has_images = bool(self.vision_enabled
                          and (s_best is not None or intent.guide_images()))
        variant = "vision" if has_images else "text"
        prompt = self.templates.render(
            f"generator_{mode}_{variant}",
            intent_text=intent.effective_text(),
            program_source=p_best.source,
            mode=mode,
            has_images=str(has_images).lower())
        parts = [text_part(prompt)]
        if has_images:
            if s_best is not None:
                parts.append(image_part(s_best.image))
            for image in intent.guide_images():
                parts.append(image_part(image))
        return [user_message(parts)]

    def expand(self, intent: Intent) -> str:
        prompt = self.templates.render("expand_intent", intent_text=intent.text)
        return self.client.complete([user_message([text_part(prompt)])],
                                    temperature=self.temperature).strip()


def propose(backend, p_best: Program, s_best: Optional[VisualState],
            intent: Intent, b: int, mode: str) -> list[str]:
    """Exactly b proposal texts (attempt 0 of each slot).

    Backend errors propagate; retry/padding policy lives in the engine.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if mode not in _MODE_SALT:
        raise ValueError(f"mode must be tweak/leap, got {mode!r}")
    return [backend.propose_one(p_best, s_best, intent, mode, slot)
            for slot in range(b)]


def expand_intent(backend, intent: Intent) -> Intent:
    """Semantic upsampling: set expanded_text, preserving the original."""
    if not intent.text:
        raise ValueError("intent text must be non-empty")
    expanded = backend.expand(intent)
    if not expanded:
        raise BackendError("backend returned an empty expansion")
    return Intent(text=intent.text, reference_images=intent.reference_images,
                  imagined_images=intent.imagined_images, expanded_text=expanded)
