"""Recursive-descent parser and type checker.

Grammar (EBNF, also in docs/dsl.md):

    program  = { binding } , "output" , expr ;
    binding  = IDENT , "=" , expr ;
    expr     = term , { "+" , term } ;
    term     = factor , { "*" , factor } ;
    factor   = NUMBER | IDENT | IDENT , "(" , [ expr , { "," , expr } ] , ")"
             | "(" , expr , ")" ;

Typing happens during the single parse pass: bindings are ordered, each
expression may reference only earlier bindings, so no second pass is
needed.  ``rgb`` applied to three number literals folds into a
ColorLiteral node.
"""

from __future__ import annotations

from typing import Optional

from . import tokens as T
from .builtins import RESERVED_NAMES, SIGNATURES
from .errors import ArityError, ParseError, TypeError_, UnknownIdentifier
from .nodes import (
    COLOR, KIND_POST, KIND_TEXTURE, SCALAR,
    Ast, BinaryOp, Call, ColorLiteral, Expr, Identifier, NumberLiteral,
)

_BINOP_RESULT = {
    ("+", SCALAR, SCALAR): SCALAR,
    ("+", COLOR, COLOR): COLOR,
    ("*", SCALAR, SCALAR): SCALAR,
    ("*", COLOR, SCALAR): COLOR,
    ("*", SCALAR, COLOR): COLOR,
    ("*", COLOR, COLOR): COLOR,
}


def infer_kind(source: str) -> str:
    """A program that mentions ``input`` is a post-process program."""
    for tok in T.tokenize(source):
        if tok.kind == T.IDENT and tok.text == "input":
            return KIND_POST
    return KIND_TEXTURE


class _Parser:
    def __init__(self, toks: list[T.Token], kind: str):
        self.toks = toks
        self.pos = 0
        self.kind = kind
        self.env: dict[str, str] = {}
        if kind == KIND_POST:
            self.env["input"] = COLOR

    def peek(self) -> T.Token:
        return self.toks[self.pos]

    def advance(self) -> T.Token:
        tok = self.toks[self.pos]
        if tok.kind != T.EOF:
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> T.Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.line, tok.col,
                             f"expected {what}, got {tok.text or 'end of input'!r}")
        return self.advance()

    def parse_program(self) -> tuple[tuple[tuple[str, Expr], ...], Expr]:
        bindings: list[tuple[str, Expr]] = []
        while self.peek().kind == T.IDENT:
            name_tok = self.advance()
            if self.peek().kind != T.EQUALS:
                raise ParseError(name_tok.line, name_tok.col,
                                 f"expected '=' after binding name {name_tok.text!r}")
            name = name_tok.text
            if name in RESERVED_NAMES:
                raise ParseError(name_tok.line, name_tok.col,
                                 f"{name!r} is reserved and cannot be bound")
            if name in self.env:
                raise ParseError(name_tok.line, name_tok.col,
                                 f"duplicate binding {name!r}")
            self.advance()  # '='
            expr = self.parse_expr()
            self.env[name] = expr.ty
            bindings.append((name, expr))
        out_tok = self.peek()
        if out_tok.kind != T.OUTPUT:
            raise ParseError(out_tok.line, out_tok.col,
                             "expected a binding or 'output'")
        self.advance()
        output = self.parse_expr()
        trailing = self.peek()
        if trailing.kind != T.EOF:
            raise ParseError(trailing.line, trailing.col,
                             f"unexpected {trailing.text!r} after output expression")
        return tuple(bindings), output

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.peek().kind == T.PLUS:
            op_tok = self.advance()
            right = self.parse_term()
            left = self._binop("+", left, right, op_tok)
        return left

    def parse_term(self) -> Expr:
        left = self.parse_factor()
        while self.peek().kind == T.STAR:
            op_tok = self.advance()
            right = self.parse_factor()
            left = self._binop("*", left, right, op_tok)
        return left

    def _binop(self, op: str, left: Expr, right: Expr, tok: T.Token) -> Expr:
        ty = _BINOP_RESULT.get((op, left.ty, right.ty))
        if ty is None:
            raise TypeError_(tok.line, tok.col,
                             f"operator {op!r} undefined for {left.ty} and {right.ty}")
        return BinaryOp(op=op, left=left, right=right, ty=ty)

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == T.NUMBER:
            self.advance()
            return NumberLiteral(value=tok.value)
        if tok.kind == T.LPAREN:
            self.advance()
            inner = self.parse_expr()
            self.expect(T.RPAREN, "')'")
            return inner
        if tok.kind == T.IDENT:
            self.advance()
            if self.peek().kind == T.LPAREN:
                return self.parse_call(tok)
            if tok.text in SIGNATURES:
                raise TypeError_(tok.line, tok.col,
                                 f"builtin {tok.text!r} must be called")
            ty = self.env.get(tok.text)
            if ty is None:
                raise UnknownIdentifier(tok.line, tok.col,
                                        f"undefined identifier {tok.text!r}")
            return Identifier(name=tok.text, ty=ty)
        raise ParseError(tok.line, tok.col,
                         f"expected an expression, got {tok.text or 'end of input'!r}")

    def parse_call(self, name_tok: T.Token) -> Expr:
        name = name_tok.text
        sig = SIGNATURES.get(name)
        if sig is None:
            raise UnknownIdentifier(name_tok.line, name_tok.col,
                                    f"unknown function {name!r}")
        if sig.post_only and self.kind != KIND_POST:
            raise TypeError_(name_tok.line, name_tok.col,
                             f"{name!r} is only available in post-process programs")
        self.expect(T.LPAREN, "'('")
        args: list[Expr] = []
        if self.peek().kind != T.RPAREN:
            args.append(self.parse_expr())
            while self.peek().kind == T.COMMA:
                self.advance()
                args.append(self.parse_expr())
        self.expect(T.RPAREN, "')'")
        return self._typed_call(name_tok, sig, tuple(args))

    def _typed_call(self, tok: T.Token, sig, args: tuple[Expr, ...]) -> Expr:
        name = sig.name
        if sig.overloads:
            arg_tys = tuple(a.ty for a in args)
            for params, ret in sig.overloads:
                if len(params) == len(args) and params == arg_tys:
                    return Call(name=name, args=args, ty=ret)
            expected = " or ".join("(" + ", ".join(p) + ")" for p, _ in sig.overloads)
            if all(len(p) != len(args) for p, _ in sig.overloads):
                raise ArityError(tok.line, tok.col,
                                 f"{name} expects {expected}, got {len(args)} args")
            raise TypeError_(tok.line, tok.col,
                             f"{name} expects {expected}, got ({', '.join(arg_tys)})")
        if sig.variadic:
            # ramp(t, pos1, color1, ..., posn, colorn), n >= 1
            if len(args) < 3 or (len(args) - 1) % 2 != 0:
                raise ArityError(tok.line, tok.col,
                                 f"{name} expects t plus one or more (pos, color) pairs")
            if args[0].ty != SCALAR:
                raise TypeError_(tok.line, tok.col, f"{name} t must be Scalar")
            for i in range(1, len(args), 2):
                if args[i].ty != SCALAR:
                    raise TypeError_(tok.line, tok.col,
                                     f"{name} position {1 + (i - 1) // 2} must be Scalar")
                if args[i + 1].ty != COLOR:
                    raise TypeError_(tok.line, tok.col,
                                     f"{name} color {1 + (i - 1) // 2} must be Color")
            return Call(name=name, args=args, ty=COLOR)
        if len(args) != len(sig.params):
            raise ArityError(tok.line, tok.col,
                             f"{name} expects {len(sig.params)} args, got {len(args)}")
        for (pname, pty), arg in zip(sig.params, args):
            if arg.ty != pty:
                raise TypeError_(tok.line, tok.col,
                                 f"{name} argument {pname!r} must be {pty}, got {arg.ty}")
        if name == "rgb" and all(isinstance(a, NumberLiteral) for a in args):
            r, g, b = (a.value for a in args)
            return ColorLiteral(r=r, g=g, b=b)
        return Call(name=name, args=args, ty=sig.ret)


def parse(source: str, kind: Optional[str] = None) -> Ast:
    """Parse and type-check ``source``.

    ``kind`` is "texture" or "post"; when omitted it is inferred (a
    program mentioning ``input`` is post-process).  Raises ParseError,
    TypeError_, UnknownIdentifier or ArityError; never anything else.
    """
    if kind is None:
        kind = infer_kind(source)
    elif kind not in (KIND_TEXTURE, KIND_POST):
        raise ValueError(f"kind must be 'texture' or 'post', got {kind!r}")
    toks = T.tokenize(source)
    parser = _Parser(toks, kind)
    bindings, output = parser.parse_program()
    return Ast(bindings=bindings, output=output, kind=kind,
               source=source, tokens=tuple(toks))
