"""Canonical source rendering of an AST.

One binding per line, then the output line.  Parentheses are emitted
only where precedence demands them ('+' binds looser than '*'), so
pretty-print(parse(s)) re-parses to a structurally equal AST.
"""

from __future__ import annotations

from .nodes import Ast, BinaryOp, Call, ColorLiteral, Expr, Identifier, NumberLiteral

_PREC = {"+": 1, "*": 2}


def format_number(value: float) -> str:
    """Shortest round-trip text for a literal; integers drop the '.0'."""
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _print_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, NumberLiteral):
        return format_number(expr.value)
    if isinstance(expr, ColorLiteral):
        return (f"rgb({format_number(expr.r)}, {format_number(expr.g)}, "
                f"{format_number(expr.b)})")
    if isinstance(expr, Identifier):
        return expr.name
    if isinstance(expr, Call):
        args = ", ".join(_print_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, BinaryOp):
        prec = _PREC[expr.op]
        text = (f"{_print_expr(expr.left, prec)} {expr.op} "
                f"{_print_expr(expr.right, prec)}")
        return f"({text})" if prec < parent_prec else text
    raise AssertionError(f"unhandled node {type(expr).__name__}")


def pretty_print(ast: Ast) -> str:
    lines = [f"{name} = {_print_expr(expr)}" for name, expr in ast.bindings]
    lines.append(f"output {_print_expr(ast.output)}")
    return "\n".join(lines) + "\n"
