"""Deterministic procedural-texture language.

A desk-scale stand-in for material/lighting scripts: parse, type-check,
render per pixel, check tweak-neighborhood membership, and mutate with
seeded tweak/leap edits.  See docs/dsl.md for grammar and the bit-exact
noise definitions.
"""

from .corpus import (DOMAIN_FOR_KIND, corpus_names, corpus_path, load_corpus,
                     post_names, texture_names)
from .errors import (ArityError, DslError, ParseError, RuntimeError_,
                     TypeError_, UnknownIdentifier)
from .mutate import leap_choice, mutate_leap
from .nodes import (COLOR, KIND_POST, KIND_TEXTURE, SCALAR, Ast, BinaryOp,
                    Call, ColorLiteral, Identifier, NumberLiteral, asts_equal)
from .noise import lattice_hash, lattice_value, value_noise
from .parser import infer_kind, parse
from .pretty import format_number, pretty_print
from .render import RenderParams, pixel_centers, quantize, render
from .tokens import tokenize
from .tweak import is_tweak, mutate_tweak

__all__ = [
    "ArityError", "Ast", "BinaryOp", "COLOR", "Call", "ColorLiteral",
    "DOMAIN_FOR_KIND", "DslError", "Identifier", "KIND_POST", "KIND_TEXTURE",
    "NumberLiteral", "ParseError", "RenderParams", "RuntimeError_", "SCALAR",
    "TypeError_", "UnknownIdentifier", "asts_equal", "corpus_names",
    "corpus_path", "format_number", "infer_kind", "is_tweak", "lattice_hash",
    "lattice_value", "leap_choice", "load_corpus", "mutate_leap",
    "mutate_tweak", "parse", "pixel_centers", "post_names", "pretty_print",
    "quantize", "render", "texture_names", "tokenize", "value_noise",
]
