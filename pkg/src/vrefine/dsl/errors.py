"""Error types raised by the texture language front end and interpreter."""

from __future__ import annotations


class DslError(Exception):
    """Base class; carries a source position when one is known."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")


class ParseError(DslError):
    """Lexical or grammatical failure."""


class TypeError_(DslError):
    """Static type violation (the language has two types: Scalar, Color)."""


class UnknownIdentifier(TypeError_):
    """Reference to a name with no prior binding (and no such builtin)."""


class ArityError(TypeError_):
    """Builtin called with the wrong number of arguments."""


class RuntimeError_(Exception):
    """Evaluation failure on otherwise well-typed input (e.g. a ramp whose
    position arguments decrease)."""
