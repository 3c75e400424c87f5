"""Vectorized per-pixel evaluation of a typed AST.

Scalars evaluate to float64 arrays of shape (N,), colors to (N, 3),
where N = W*H in row-major order.  Everything is elementwise IEEE
arithmetic, so results are independent of pixel evaluation order.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import noise
from .errors import RuntimeError_
from .nodes import (
    COLOR, SCALAR,
    Ast, BinaryOp, Call, ColorLiteral, Expr, Identifier, NumberLiteral,
)

_DEG = math.pi / 180.0
_TAU = 2.0 * math.pi


class PixelContext:
    """Evaluation context: pixel-center coordinates and the render seed."""

    def __init__(self, u: np.ndarray, v: np.ndarray, seed: int,
                 input_color: Optional[np.ndarray] = None):
        self.u = u
        self.v = v
        self.seed = seed
        self.input_color = input_color
        self.env: dict[str, np.ndarray] = {}

    @property
    def count(self) -> int:
        return self.u.shape[0]


def _as_field(value: np.ndarray, n: int, ty: str) -> np.ndarray:
    """Broadcast a possibly-constant result to full per-pixel shape."""
    shape = (n,) if ty == SCALAR else (n, 3)
    return np.broadcast_to(value, shape)


def eval_expr(expr: Expr, ctx: PixelContext) -> np.ndarray:
    if isinstance(expr, NumberLiteral):
        return np.full(ctx.count, expr.value)
    if isinstance(expr, ColorLiteral):
        out = np.empty((ctx.count, 3))
        out[:, 0] = expr.r
        out[:, 1] = expr.g
        out[:, 2] = expr.b
        return out
    if isinstance(expr, Identifier):
        if expr.name == "input":
            return ctx.input_color
        return ctx.env[expr.name]
    if isinstance(expr, BinaryOp):
        left = eval_expr(expr.left, ctx)
        right = eval_expr(expr.right, ctx)
        if expr.op == "+":
            return left + right
        # '*': scale a color by a scalar from either side, else elementwise
        if left.ndim == 2 and right.ndim == 1:
            return left * right[:, None]
        if left.ndim == 1 and right.ndim == 2:
            return left[:, None] * right
        return left * right
    if isinstance(expr, Call):
        return _eval_call(expr, ctx)
    raise AssertionError(f"unhandled node {type(expr).__name__}")


def _eval_call(call: Call, ctx: PixelContext) -> np.ndarray:
    name = call.name
    args = [eval_expr(a, ctx) for a in call.args]
    if name == "noise":
        scale, seed_off = args
        seeds = noise.combine_seed(ctx.seed, seed_off)
        return noise.value_noise_grid(ctx.u * scale, ctx.v * scale, seeds)
    if name == "voronoi":
        scale, seed_off, rnd = args
        seeds = noise.combine_seed(ctx.seed, seed_off)
        return noise.voronoi_grid(ctx.u * scale, ctx.v * scale, seeds, rnd)
    if name == "checker":
        (scale,) = args
        x = np.clip(ctx.u * scale, -noise.COORD_LIMIT, noise.COORD_LIMIT)
        y = np.clip(ctx.v * scale, -noise.COORD_LIMIT, noise.COORD_LIMIT)
        parity = (np.floor(x).astype(np.int64) + np.floor(y).astype(np.int64)) & 1
        return np.where(parity == 0, 1.0, 0.0)
    if name == "stripes":
        scale, angle = args
        theta = angle * _DEG
        t = ctx.u * np.cos(theta) + ctx.v * np.sin(theta)
        return 0.5 + 0.5 * np.sin(_TAU * scale * t)
    if name == "clamp":
        x, lo, hi = args
        return np.minimum(np.maximum(x, lo), hi)
    if name == "mix":
        a, b, t = args
        if a.ndim == 2:
            t = t[:, None]
        return a + t * (b - a)
    if name == "rgb":
        return np.stack(args, axis=-1)
    if name == "ramp":
        return _eval_ramp(args, ctx.count)
    if name == "exposure":
        color, e = args
        return color * np.exp2(e)[:, None]
    if name == "tint":
        color, tint = args
        return color * tint
    if name == "contrast":
        color, c = args
        return np.clip((color - 0.5) * c[:, None] + 0.5, 0.0, 1.0)
    raise AssertionError(f"unhandled builtin {name!r}")


def _eval_ramp(args: list[np.ndarray], n: int) -> np.ndarray:
    """Piecewise-linear color ramp.

    Positions must be non-decreasing at every pixel.  t below the first
    position takes the first color, above the last the last color; on a
    zero-length segment the later color wins.
    """
    t = args[0]
    positions = args[1::2]
    colors = args[2::2]
    for i in range(1, len(positions)):
        if np.any(positions[i] < positions[i - 1]):
            raise RuntimeError_(
                f"ramp positions decrease between stop {i} and {i + 1}")
    out = np.array(np.broadcast_to(colors[0], (n, 3)))
    for i in range(1, len(positions)):
        lo = positions[i - 1]
        hi = positions[i]
        seg = hi - lo
        safe = np.where(seg > 0.0, seg, 1.0)
        w = np.clip(np.where(seg > 0.0, (t - lo) / safe, 1.0), 0.0, 1.0)
        blend = colors[i - 1] + w[:, None] * (colors[i] - colors[i - 1])
        active = (t >= lo)[:, None]
        out = np.where(active, blend, out)
    return out


def eval_program(ast: Ast, ctx: PixelContext) -> np.ndarray:
    """Evaluate a whole program to an (N, 3) color field.

    Scalar outputs promote to gray (c, c, c).
    """
    ctx.env = {}
    for name, expr in ast.bindings:
        ctx.env[name] = eval_expr(expr, ctx)
    out = eval_expr(ast.output, ctx)
    if ast.output.ty == SCALAR:
        out = np.repeat(out[:, None], 3, axis=1)
    return _as_field(out, ctx.count, COLOR)
