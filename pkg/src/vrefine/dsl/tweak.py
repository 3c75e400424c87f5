"""The tweak neighborhood: numeric-literal-only edits.

``is_tweak`` compares token streams: two programs are tweaks of each
other iff the streams have the same length and every pair of tokens
agrees in kind and, for non-NUMBER tokens, in text.  NUMBER values are
free.  Comments and whitespace never produce tokens, so they are
invisible to the check.

``mutate_tweak`` perturbs literals by splicing new number texts into the
original source at the exact token spans, which preserves formatting and
guarantees membership in the neighborhood.  The draw stream (documented
for independent reimplementation): one ``unit()`` per literal in source
order; when it is < 0.4 the literal is perturbed with one further
``unit()`` u as value * (0.5 + u), or (u - 0.5) * 0.5 when the literal
is exactly 0.
"""

from __future__ import annotations

from ..rng import Rng
from .nodes import Ast
from .pretty import format_number
from .tokens import NUMBER, tokenize

TWEAK_PROBABILITY = 0.4


def is_tweak(p_source: str, q_source: str) -> bool:
    """True iff the two programs differ only in numeric literal values."""
    p_toks = tokenize(p_source)
    q_toks = tokenize(q_source)
    if len(p_toks) != len(q_toks):
        return False
    for a, b in zip(p_toks, q_toks):
        if a.kind != b.kind:
            return False
        if a.kind != NUMBER and a.text != b.text:
            return False
    return True


def mutate_tweak(ast: Ast, rng_seed: int) -> str:
    """Perturb numeric literals of ``ast``'s source; returns new source text.

    Deterministic in ``rng_seed``; the output always satisfies
    is_tweak(ast.source, output).
    """
    rng = Rng(rng_seed)
    source = ast.source
    pieces: list[str] = []
    cursor = 0
    for tok in ast.tokens:
        if tok.kind != NUMBER:
            continue
        replacement = None
        if rng.unit() < TWEAK_PROBABILITY:
            u = rng.unit()
            if tok.value == 0.0:
                new_value = (u - 0.5) * 0.5
            else:
                new_value = tok.value * (0.5 + u)
            replacement = format_number(new_value)
        if replacement is not None:
            pieces.append(source[cursor:tok.start])
            pieces.append(replacement)
            cursor = tok.end
    pieces.append(source[cursor:])
    return "".join(pieces)
