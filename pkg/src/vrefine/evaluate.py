"""Visual state evaluation: pairwise comparison and the tournament.

``compare`` returns a strict Choice (ties break to the first argument at
the oracle; the VLM contract demands a strict token).  ``tournament``
runs a single-elimination bracket over a seed-shuffled ordering, the
incumbent pinned to the last slot, byes to the trailing entry of odd
rounds -- exactly n-1 comparisons for n entries, ceil(log2 n) rounds.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BackendError, DimensionMismatch
from .rng import Rng, mix64
from .templates import TemplateSet, load_templates
from .types import Intent, Program, VisualState
from .vlm import ChatClient, image_part, text_part, user_message


@dataclass(frozen=True)
class Choice:
    winner: str                  # "first" | "second"
    rationale: Optional[str] = None
    queries_used: int = 1

    def __post_init__(self):
        if self.winner not in ("first", "second"):
            raise ValueError(f"winner must be first/second, got {self.winner!r}")


def mse(a: VisualState, b: VisualState) -> float:
    """Mean squared error over pixels and channels of [0,1]-normalized values."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{a.width}x{a.height} vs {b.width}x{b.height}")
    diff = a.image.astype(np.float64) / 255.0 - b.image.astype(np.float64) / 255.0
    return float(np.mean(diff * diff))


class OracleMseEvaluator:
    """Deterministic evaluator: lower MSE against a fixed target wins."""

    def __init__(self, target: VisualState):
        self.target = target

    def score(self, state: VisualState) -> float:
        return mse(state, self.target)

    def compare(self, s1: VisualState, s2: VisualState, intent: Intent,
                p1: Optional[Program] = None, p2: Optional[Program] = None) -> Choice:
        if (s1.width, s1.height) != (s2.width, s2.height):
            raise DimensionMismatch(
                f"{s1.width}x{s1.height} vs {s2.width}x{s2.height}")
        m1 = self.score(s1)
        m2 = self.score(s2)
        winner = "first" if m1 <= m2 else "second"
        return Choice(winner=winner, rationale=f"mse {m1:.6g} vs {m2:.6g}")


_CHOICE_RE = re.compile(r"\b(FIRST|SECOND)\b", re.IGNORECASE)


def parse_choice(response: str) -> Optional[str]:
    """Extract the strict choice token; None when the reply names neither."""
    m = _CHOICE_RE.search(response)
    return m.group(1).lower() if m else None


class VlmPairwiseEvaluator:
    """Asks a VLM which of two states better matches the intent.

    With vision enabled the two renders (and any guide images) go into
    the prompt; without it the comparison is made purely on the program
    code.  Unparseable replies retry up to ``eval_retries`` times, then
    default to the first state.
    """

    def __init__(self, client: Optional[ChatClient] = None,
                 vision_enabled: bool = True, eval_retries: int = 1,
                 temperature: float = 0.0,
                 templates: Optional[TemplateSet] = None):
        self.client = client or ChatClient()
        self.vision_enabled = vision_enabled
        self.eval_retries = eval_retries
        self.temperature = temperature
        self.templates = templates or load_templates()

    def compare(self, s1: VisualState, s2: VisualState, intent: Intent,
                p1: Optional[Program] = None, p2: Optional[Program] = None) -> Choice:
        if (s1.width, s1.height) != (s2.width, s2.height):
            raise DimensionMismatch(
                f"{s1.width}x{s1.height} vs {s2.width}x{s2.height}")
        messages = self._messages(s1, s2, intent, p1, p2)
        queries = 0
        for _ in range(self.eval_retries + 1):
            queries += 1
            response = self.client.complete(messages, temperature=self.temperature)
            winner = parse_choice(response)
            if winner is not None:
                return Choice(winner=winner, rationale=response,
                              queries_used=queries)
        return Choice(winner="first", rationale="unparseable; defaulted",
                      queries_used=queries)

    def _messages(self, s1, s2, intent, p1, p2) -> list[dict]:
        if self.vision_enabled:
            prompt = self.templates.render(
                "evaluator_vision", intent_text=intent.effective_text())
            parts = [text_part(prompt)]
            for image in intent.guide_images():
                parts.append(image_part(image))
            parts.append(text_part("FIRST candidate:"))
            parts.append(image_part(s1.image))
            parts.append(text_part("SECOND candidate:"))
            parts.append(image_part(s2.image))
        else:
            prompt = self.templates.render(
                "evaluator_text",
                intent_text=intent.effective_text(),
                first_source=p1.source if p1 else "",
                second_source=p2.source if p2 else "")
            parts = [text_part(prompt)]
        return [user_message(parts)]


def tournament(backend, pool: Sequence[tuple[Program, VisualState]],
               intent: Intent, seed: int,
               incumbent_last: bool = False) -> tuple[int, int]:
    """Single-elimination selection; returns (winner index, comparisons).

    The entry order is shuffled by a splitmix64 Fisher-Yates keyed on
    ``seed``; when ``incumbent_last`` the final pool entry keeps the last
    bracket slot.  In every round adjacent entries meet; a trailing odd
    entry gets a bye.  n-1 comparisons for n entries.
    """
    if not pool:
        raise ValueError("tournament pool must be non-empty")
    entries = list(range(len(pool)))
    if incumbent_last and len(entries) > 1:
        head = entries[:-1]
        Rng(mix64(seed, 0x7031)).shuffle(head)
        entries = head + [entries[-1]]
    else:
        Rng(mix64(seed, 0x7031)).shuffle(entries)

    comparisons = 0
    while len(entries) > 1:
        survivors = []
        for i in range(0, len(entries) - 1, 2):
            a, b = entries[i], entries[i + 1]
            choice = backend.compare(pool[a][1], pool[b][1], intent,
                                     p1=pool[a][0], p2=pool[b][0])
            comparisons += 1
            survivors.append(a if choice.winner == "first" else b)
        if len(entries) % 2 == 1:
            survivors.append(entries[-1])
        entries = survivors
    return entries[0], comparisons


def bracket_depth(n: int) -> int:
    """Rounds a pool of n entries takes: ceil(log2 n)."""
    return max(0, math.ceil(math.log2(n))) if n > 0 else 0
