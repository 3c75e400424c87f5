"""Builtin function signature table.

``u, v`` are pixel-center coordinates ``(px + 0.5) / W`` and
``(py + 0.5) / H``, both in [0, 1).  Scalar-generator builtins sample the
plane at ``(u * scale, v * scale)``.

``mix`` is overloaded: (Scalar, Scalar, Scalar) -> Scalar and
(Color, Color, Scalar) -> Color.  ``ramp`` is variadic:
``ramp(t, pos1, color1, ..., posn, colorn)`` with n >= 1 stop pairs.
``exposure``, ``tint`` and ``contrast`` (and the ``input`` identifier)
are only available in post-process programs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .nodes import COLOR, SCALAR


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[tuple[str, str], ...]   # (param name, type)
    ret: str
    post_only: bool = False
    variadic: bool = False                # ramp-style trailing (Scalar, Color) pairs
    overloads: tuple[tuple[tuple[str, ...], str], ...] = ()


SIGNATURES: dict[str, Signature] = {
    "noise": Signature("noise", (("scale", SCALAR), ("seed_off", SCALAR)), SCALAR),
    "voronoi": Signature(
        "voronoi",
        (("scale", SCALAR), ("seed_off", SCALAR), ("randomness", SCALAR)),
        SCALAR),
    "checker": Signature("checker", (("scale", SCALAR),), SCALAR),
    "stripes": Signature("stripes", (("scale", SCALAR), ("angle_deg", SCALAR)), SCALAR),
    "clamp": Signature("clamp", (("x", SCALAR), ("lo", SCALAR), ("hi", SCALAR)), SCALAR),
    "mix": Signature(
        "mix", (), SCALAR,
        overloads=(((SCALAR, SCALAR, SCALAR), SCALAR), ((COLOR, COLOR, SCALAR), COLOR))),
    "rgb": Signature("rgb", (("r", SCALAR), ("g", SCALAR), ("b", SCALAR)), COLOR),
    "ramp": Signature("ramp", (("t", SCALAR),), COLOR, variadic=True),
    "exposure": Signature("exposure", (("input", COLOR), ("e", SCALAR)), COLOR,
                          post_only=True),
    "tint": Signature("tint", (("input", COLOR), ("color", COLOR)), COLOR,
                      post_only=True),
    "contrast": Signature("contrast", (("input", COLOR), ("c", SCALAR)), COLOR,
                          post_only=True),
}

RESERVED_NAMES = frozenset(SIGNATURES) | {"output", "input"}


def is_builtin(name: str) -> bool:
    return name in SIGNATURES


def builtin_names(ret: Optional[str] = None, post: bool = False) -> list[str]:
    """Builtin names, optionally filtered by return type and program kind."""
    names = []
    for name, sig in SIGNATURES.items():
        if sig.post_only and not post:
            continue
        if ret is not None:
            rets = {r for _, r in sig.overloads} if sig.overloads else {sig.ret}
            if ret not in rets:
                continue
        names.append(name)
    return names
