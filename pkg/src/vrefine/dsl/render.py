"""Composite rendering: one texture program, then post-process programs.

Rendering is a pure function of (programs, width, height, seed); repeated
calls produce byte-identical images.  The pipeline stays in continuous
float64 (post programs see the raw upstream color, unclamped); channels
quantize once at the end as round(clamp(c, 0, 1) * 255) with
round-half-to-even, non-finite values mapping to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..types import VisualState
from .errors import RuntimeError_
from .interp import PixelContext, eval_program
from .nodes import KIND_POST, KIND_TEXTURE, Ast


@dataclass(frozen=True)
class RenderParams:
    width: int = 64
    height: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")


def pixel_centers(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) arrays of length W*H, row-major, u = (px+0.5)/W, v = (py+0.5)/H."""
    us = (np.arange(width, dtype=np.float64) + 0.5) / width
    vs = (np.arange(height, dtype=np.float64) + 0.5) / height
    u = np.tile(us, height)
    v = np.repeat(vs, width)
    return u, v


def quantize(color: np.ndarray) -> np.ndarray:
    """(N, 3) float -> uint8 per the documented rule."""
    safe = np.where(np.isfinite(color), color, 0.0)
    return np.rint(np.clip(safe, 0.0, 1.0) * 255.0).astype(np.uint8)


def render(programs: Sequence[Ast], params: RenderParams,
           program_ids: Sequence[str] = ()) -> VisualState:
    """Execute the program stack and return the rendered state.

    The first program must be a texture program; all subsequent ones
    post-process programs.  Raises RuntimeError_ on evaluation failures.
    """
    if not programs:
        raise ValueError("at least one program is required")
    if programs[0].kind != KIND_TEXTURE:
        raise RuntimeError_("first program must be a texture program")
    for p in programs[1:]:
        if p.kind != KIND_POST:
            raise RuntimeError_("programs after the first must be post-process")

    u, v = pixel_centers(params.width, params.height)
    ctx = PixelContext(u, v, params.seed)
    color = eval_program(programs[0], ctx)
    for post in programs[1:]:
        ctx.input_color = color
        color = eval_program(post, ctx)

    image = quantize(color).reshape(params.height, params.width, 3)
    return VisualState(image=image, width=params.width, height=params.height,
                       seed=params.seed, program_ids=tuple(program_ids))
