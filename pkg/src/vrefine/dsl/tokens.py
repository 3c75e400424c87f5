"""Lexer for the texture language.

Tokens carry line/column (1-based) and the exact source span so the
tweak mutator can splice replacement literals into the original text
without disturbing anything else.

A ``-`` starts a NUMBER token only when (a) the next character is a
digit or ``.`` and (b) the previously emitted token is not a NUMBER,
IDENT or ``)``.  There is no binary minus in the language.  ``#``
comments run to end of line and produce no tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError

# Token kinds
NUMBER = "NUMBER"
IDENT = "IDENT"
OUTPUT = "OUTPUT"
EQUALS = "EQUALS"
LPAREN = "LPAREN"
RPAREN = "RPAREN"
COMMA = "COMMA"
PLUS = "PLUS"
STAR = "STAR"
EOF = "EOF"

_SINGLE = {"=": EQUALS, "(": LPAREN, ")": RPAREN, ",": COMMA, "+": PLUS, "*": STAR}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    start: int          # offset into the source string
    end: int            # one past the last character
    value: Optional[float] = None   # set for NUMBER tokens


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(source: str) -> list[Token]:
    """Lex ``source`` into a token list ending with EOF.

    Raises ParseError on unknown characters or malformed numbers.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def prev_kind() -> Optional[str]:
        return tokens[-1].kind if tokens else None

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue

        start_i, start_line, start_col = i, line, col

        neg_number = (
            ch == "-"
            and i + 1 < n
            and (source[i + 1].isdigit() or source[i + 1] == ".")
            and prev_kind() not in (NUMBER, IDENT, RPAREN)
        )
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()) or neg_number:
            j = i + 1 if neg_number else i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                if source[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
                else:
                    raise ParseError(start_line, start_col, "malformed exponent")
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ParseError(start_line, start_col, f"bad number {text!r}") from None
            if not math.isfinite(value):
                raise ParseError(start_line, start_col, f"number out of range: {text}")
            tokens.append(Token(NUMBER, text, start_line, start_col, i, j, value))
            col += j - i
            i = j
            continue

        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            kind = OUTPUT if text == "output" else IDENT
            tokens.append(Token(kind, text, start_line, start_col, i, j))
            col += j - i
            i = j
            continue

        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, col, i, i + 1))
            i += 1
            col += 1
            continue

        raise ParseError(line, col, f"unexpected character {ch!r}")

    tokens.append(Token(EOF, "", line, col, i, i))
    return tokens
