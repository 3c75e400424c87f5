"""Typed AST for the texture language.

Every expression node carries its static type (``SCALAR`` or ``COLOR``),
assigned by the parser.  ``Ast`` keeps the original source text and token
stream so mutators can work at the token level when they need to preserve
formatting exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .tokens import Token

SCALAR = "Scalar"
COLOR = "Color"

KIND_TEXTURE = "texture"
KIND_POST = "post"


@dataclass(frozen=True)
class NumberLiteral:
    value: float
    ty: str = SCALAR


@dataclass(frozen=True)
class ColorLiteral:
    r: float
    g: float
    b: float
    ty: str = COLOR


@dataclass(frozen=True)
class Identifier:
    name: str
    ty: str = SCALAR


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    ty: str = SCALAR


@dataclass(frozen=True)
class BinaryOp:
    op: str                       # "+" or "*"
    left: "Expr"
    right: "Expr"
    ty: str = SCALAR


Expr = Union[NumberLiteral, ColorLiteral, Identifier, Call, BinaryOp]


@dataclass(frozen=True)
class Ast:
    """A parsed program: ordered bindings and one output expression."""

    bindings: tuple[tuple[str, Expr], ...]
    output: Expr
    kind: str                      # KIND_TEXTURE or KIND_POST
    source: str = ""
    tokens: tuple[Token, ...] = field(default=(), repr=False)

    @property
    def output_type(self) -> str:
        return self.output.ty


def walk(expr: Expr):
    """Yield ``expr`` and all descendants, pre-order, argument order."""
    yield expr
    if isinstance(expr, Call):
        for arg in expr.args:
            yield from walk(arg)
    elif isinstance(expr, BinaryOp):
        yield from walk(expr.left)
        yield from walk(expr.right)


def walk_program(ast: Ast):
    """Pre-order walk over all binding expressions, then the output."""
    for _, expr in ast.bindings:
        yield from walk(expr)
    yield from walk(ast.output)


def structurally_equal(a: Expr, b: Expr) -> bool:
    """Structural equality ignoring token provenance (dataclass eq covers it)."""
    return a == b


def asts_equal(a: Ast, b: Ast) -> bool:
    """Equality of program structure: bindings, output, kind (not source text)."""
    return a.kind == b.kind and a.bindings == b.bindings and a.output == b.output
