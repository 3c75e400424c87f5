"""Structural ("leap") mutations.

One mutation per call, chosen by the first draw of the seeded stream
(``below(3)``): 0 wraps the output in a mix against a fresh random
subexpression, 1 replaces a random call with a different builtin of the
same return type (fresh arguments), 2 re-drives the output through a
color ramp over an existing scalar subexpression.  Choices 1 and 2 fall
back to 0 when the program has no suitable node.  Generated subtrees
nest at most 4 levels.  Output always parses and type-checks for the
program's kind.
"""

from __future__ import annotations

from ..rng import Rng
from .builtins import SIGNATURES, builtin_names
from .nodes import (
    COLOR, KIND_POST, SCALAR,
    Ast, BinaryOp, Call, ColorLiteral, Expr, Identifier, NumberLiteral,
    walk_program,
)
from .pretty import pretty_print

MAX_GEN_DEPTH = 4

_SCALAR_LEAF = "leaf"


def _round3(x: float) -> float:
    return round(x, 3)


def _gen_scalar(rng: Rng, depth: int, post: bool) -> Expr:
    if depth <= 1:
        return NumberLiteral(value=_round3(rng.unit() * 4.0))
    pick = rng.below(6)
    if pick == 0:
        return NumberLiteral(value=_round3(rng.unit() * 4.0))
    if pick == 1:
        return Call("noise", (
            NumberLiteral(value=_round3(1.0 + rng.unit() * 9.0)),
            NumberLiteral(value=float(rng.below(64)))), ty=SCALAR)
    if pick == 2:
        return Call("voronoi", (
            NumberLiteral(value=_round3(1.0 + rng.unit() * 9.0)),
            NumberLiteral(value=float(rng.below(64))),
            NumberLiteral(value=_round3(rng.unit()))), ty=SCALAR)
    if pick == 3:
        return Call("checker", (
            NumberLiteral(value=_round3(1.0 + rng.unit() * 9.0)),), ty=SCALAR)
    if pick == 4:
        return Call("stripes", (
            NumberLiteral(value=_round3(1.0 + rng.unit() * 9.0)),
            NumberLiteral(value=_round3(rng.unit() * 180.0))), ty=SCALAR)
    return Call("mix", (
        _gen_scalar(rng, depth - 1, post),
        _gen_scalar(rng, depth - 1, post),
        _gen_scalar(rng, depth - 1, post)), ty=SCALAR)


def _gen_color_literal(rng: Rng) -> ColorLiteral:
    return ColorLiteral(r=_round3(rng.unit()), g=_round3(rng.unit()),
                        b=_round3(rng.unit()))


def _gen_color(rng: Rng, depth: int, post: bool) -> Expr:
    n_choices = 4 if post else 3
    pick = rng.below(n_choices) if depth > 1 else 0
    if pick == 0:
        return _gen_color_literal(rng)
    if pick == 1:
        return Call("mix", (
            _gen_color(rng, depth - 1, post),
            _gen_color(rng, depth - 1, post),
            _gen_scalar(rng, depth - 1, post)), ty=COLOR)
    if pick == 2:
        return _gen_ramp(rng, _gen_scalar(rng, depth - 1, post))
    return Identifier(name="input", ty=COLOR)


def _gen_ramp(rng: Rng, t: Expr) -> Expr:
    stops = 2 + rng.below(2)
    positions = sorted(_round3(rng.unit()) for _ in range(stops))
    args: list[Expr] = [t]
    for pos in positions:
        args.append(NumberLiteral(value=pos))
        args.append(_gen_color_literal(rng))
    return Call("ramp", tuple(args), ty=COLOR)


def _gen_expr(rng: Rng, ty: str, depth: int, post: bool) -> Expr:
    return _gen_scalar(rng, depth, post) if ty == SCALAR else _gen_color(rng, depth, post)


def _fresh_args(rng: Rng, name: str, ret: str, post: bool) -> tuple[Expr, ...]:
    sig = SIGNATURES[name]
    if name == "mix":
        params = (SCALAR, SCALAR, SCALAR) if ret == SCALAR else (COLOR, COLOR, SCALAR)
        return tuple(_gen_expr(rng, p, MAX_GEN_DEPTH - 1, post) for p in params)
    if name == "ramp":
        gen = _gen_ramp(rng, _gen_scalar(rng, MAX_GEN_DEPTH - 1, post))
        return gen.args
    return tuple(_gen_expr(rng, pty, MAX_GEN_DEPTH - 1, post)
                 for _, pty in sig.params)


def _replace_expr(expr: Expr, target: Expr, replacement: Expr) -> Expr:
    """Replace the first occurrence (by identity) of ``target``."""
    if expr is target:
        return replacement
    if isinstance(expr, Call):
        args = tuple(_replace_expr(a, target, replacement) for a in expr.args)
        return Call(expr.name, args, ty=expr.ty)
    if isinstance(expr, BinaryOp):
        return BinaryOp(expr.op,
                        _replace_expr(expr.left, target, replacement),
                        _replace_expr(expr.right, target, replacement),
                        ty=expr.ty)
    return expr


def leap_choice(rng_seed: int) -> int:
    """First draw of the leap stream: which mutation a seed selects."""
    return Rng(rng_seed).below(3)


def mutate_leap(ast: Ast, rng_seed: int) -> str:
    """Apply one structural mutation; returns new source text."""
    rng = Rng(rng_seed)
    post = ast.kind == KIND_POST
    choice = rng.below(3)

    if choice == 1:
        calls = [e for e in walk_program(ast) if isinstance(e, Call)]
        if calls:
            target = calls[rng.below(len(calls))]
            options = [n for n in builtin_names(ret=target.ty, post=post)
                       if n != target.name]
            if options:
                name = options[rng.below(len(options))]
                fresh = Call(name, _fresh_args(rng, name, target.ty, post),
                             ty=target.ty)
                bindings = tuple(
                    (bname, _replace_expr(bexpr, target, fresh))
                    for bname, bexpr in ast.bindings)
                output = _replace_expr(ast.output, target, fresh)
                return pretty_print(Ast(bindings=bindings, output=output,
                                        kind=ast.kind))
        choice = 0

    if choice == 2:
        scalars = [e for e in walk_program(ast) if e.ty == SCALAR]
        if scalars:
            driver = scalars[rng.below(len(scalars))]
            output = _gen_ramp(rng, driver)
            return pretty_print(Ast(bindings=ast.bindings, output=output,
                                    kind=ast.kind))
        choice = 0

    # choice 0: wrap the output in a mix against fresh material
    partner = _gen_expr(rng, ast.output.ty, MAX_GEN_DEPTH, post)
    weight = _gen_scalar(rng, 2, post)
    output = Call("mix", (ast.output, partner, weight), ty=ast.output.ty)
    return pretty_print(Ast(bindings=ast.bindings, output=output, kind=ast.kind))
