"""Deterministic lattice noise and cellular noise.

Bit-exact definition (all integer arithmetic is unsigned 64-bit with
wrap-around; all real arithmetic is IEEE double):

    h(xi, yi, s) = splitmix64_finalize(
        xi * 0x9E3779B97F4A7C15  XOR  yi * 0xC2B2AE3D27D4EB4F
                                 XOR   s * 0x165667B19E3779F9 )
    lattice value  = (h >> 11) / 2^53            -- in [0, 1)
    fade           = f(t) = 6t^5 - 15t^4 + 10t^3,
                     evaluated as t*t*t * (t * (t*6 - 15) + 10)
    lerp(a, b, t)  = a + t * (b - a)

    value_noise(x, y, s):
        x0 = floor(x), y0 = floor(y); tx = x - x0, ty = y - y0
        nx0 = lerp(v(x0, y0),   v(x0+1, y0),   f(tx))
        nx1 = lerp(v(x0, y0+1), v(x0+1, y0+1), f(tx))
        return lerp(nx0, nx1, f(ty))

Negative lattice coordinates hash via their two's-complement 64-bit
representation.  Evaluation coordinates are clamped to +/- 2^52 before
flooring so integer conversion never overflows; seed offsets are
truncated toward zero and added to the render seed mod 2^64.

There are two implementations of everything: a scalar pure-Python one
(the citable reference, also exported as ``value_noise``) and a
vectorized numpy one used by the renderer.  They perform the identical
sequence of IEEE operations, so their outputs agree to the last bit;
tests enforce this.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import splitmix64_finalize

_MASK = (1 << 64) - 1
_CX = 0x9E3779B97F4A7C15
_CY = 0xC2B2AE3D27D4EB4F
_CS = 0x165667B19E3779F9
# Second stream for the y-jitter of voronoi feature points.
_VORONOI_Y = 0xD1B54A32D192ED03

_TWO53 = 9007199254740992.0  # 2**53
COORD_LIMIT = 4503599627370496.0  # 2**52
# Largest double below 1.0; voronoi distances clamp here to stay in [0, 1).
_ONE_BELOW = math.nextafter(1.0, 0.0)


# ---------------------------------------------------------------- scalar

def lattice_hash(xi: int, yi: int, seed: int) -> int:
    """h(xi, yi, s) as defined above; inputs taken mod 2^64."""
    a = ((xi & _MASK) * _CX) & _MASK
    b = ((yi & _MASK) * _CY) & _MASK
    c = ((seed & _MASK) * _CS) & _MASK
    return splitmix64_finalize(a ^ b ^ c)


def lattice_value(xi: int, yi: int, seed: int) -> float:
    return (lattice_hash(xi, yi, seed) >> 11) / _TWO53


def fade(t: float) -> float:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def value_noise(x: float, y: float, seed: int) -> float:
    """Scalar value noise in [0, 1); the reference implementation."""
    x = min(max(x, -COORD_LIMIT), COORD_LIMIT)
    y = min(max(y, -COORD_LIMIT), COORD_LIMIT)
    x0 = math.floor(x)
    y0 = math.floor(y)
    tx = x - x0
    ty = y - y0
    xi = int(x0)
    yi = int(y0)
    v00 = lattice_value(xi, yi, seed)
    v10 = lattice_value(xi + 1, yi, seed)
    v01 = lattice_value(xi, yi + 1, seed)
    v11 = lattice_value(xi + 1, yi + 1, seed)
    fx = fade(tx)
    fy = fade(ty)
    nx0 = v00 + fx * (v10 - v00)
    nx1 = v01 + fx * (v11 - v01)
    return nx0 + fy * (nx1 - nx0)


# ------------------------------------------------------------ vectorized

def _hash_grid(xi: np.ndarray, yi: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Vectorized h() on int64 lattice coords and uint64 seeds."""
    a = xi.astype(np.uint64) * np.uint64(_CX)
    b = yi.astype(np.uint64) * np.uint64(_CY)
    c = seed * np.uint64(_CS)
    z = a ^ b ^ c
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _unit(h: np.ndarray) -> np.ndarray:
    return (h >> np.uint64(11)).astype(np.float64) / _TWO53


def combine_seed(render_seed: int, seed_off: np.ndarray) -> np.ndarray:
    """render seed + trunc(seed_off), mod 2^64, as a uint64 array.

    Offsets are clamped to +/- 2^62 before truncation so the float to
    int conversion is always defined.
    """
    off = np.clip(np.trunc(np.asarray(seed_off, dtype=np.float64)),
                  -4.611686018427388e18, 4.611686018427388e18)
    off_i = off.astype(np.int64)
    return np.uint64(render_seed & _MASK) + off_i.astype(np.uint64)


def value_noise_grid(x: np.ndarray, y: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Vectorized twin of ``value_noise``; bit-identical per element."""
    x = np.clip(x, -COORD_LIMIT, COORD_LIMIT)
    y = np.clip(y, -COORD_LIMIT, COORD_LIMIT)
    x0 = np.floor(x)
    y0 = np.floor(y)
    tx = x - x0
    ty = y - y0
    xi = x0.astype(np.int64)
    yi = y0.astype(np.int64)
    one = np.int64(1)
    v00 = _unit(_hash_grid(xi, yi, seed))
    v10 = _unit(_hash_grid(xi + one, yi, seed))
    v01 = _unit(_hash_grid(xi, yi + one, seed))
    v11 = _unit(_hash_grid(xi + one, yi + one, seed))
    fx = tx * tx * tx * (tx * (tx * 6.0 - 15.0) + 10.0)
    fy = ty * ty * ty * (ty * (ty * 6.0 - 15.0) + 10.0)
    nx0 = v00 + fx * (v10 - v00)
    nx1 = v01 + fx * (v11 - v01)
    return nx0 + fy * (nx1 - nx0)


def voronoi_grid(x: np.ndarray, y: np.ndarray, seed: np.ndarray,
                 randomness: np.ndarray) -> np.ndarray:
    """Nearest-feature distance over a 3x3 cell neighborhood, in [0, 1).

    The feature point of cell (cx, cy) sits at the cell center, displaced
    by (jx - 0.5, jy - 0.5) * randomness where jx, jy are unit values from
    h(cx, cy, s) and h(cx, cy, s XOR 0xD1B54A32D192ED03).  ``randomness``
    is clamped to [0, 1]; distances clamp to just below 1.
    """
    x = np.clip(x, -COORD_LIMIT, COORD_LIMIT)
    y = np.clip(y, -COORD_LIMIT, COORD_LIMIT)
    rnd = np.clip(randomness, 0.0, 1.0)
    cx = np.floor(x).astype(np.int64)
    cy = np.floor(y).astype(np.int64)
    seed_y = seed ^ np.uint64(_VORONOI_Y)
    best = np.full(np.broadcast(x, y).shape, np.inf)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            gx = cx + np.int64(dx)
            gy = cy + np.int64(dy)
            jx = _unit(_hash_grid(gx, gy, seed))
            jy = _unit(_hash_grid(gx, gy, seed_y))
            fx = gx.astype(np.float64) + 0.5 + (jx - 0.5) * rnd
            fy = gy.astype(np.float64) + 0.5 + (jy - 0.5) * rnd
            ex = x - fx
            ey = y - fy
            d = np.sqrt(ex * ex + ey * ey)
            best = np.minimum(best, d)
    return np.clip(best, 0.0, _ONE_BELOW)
