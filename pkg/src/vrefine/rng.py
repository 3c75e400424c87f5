"""Deterministic 64-bit RNG used everywhere randomness is needed.

The generator is splitmix64: the state advances by the golden-gamma
constant and each output is the splitmix64 finalizer applied to the new
state.  All arithmetic is unsigned 64-bit with wrap-around.  The stream
is small enough to reimplement in a few lines, which is the point: tests
check mutation and shuffle behaviour against independent
reimplementations of this exact stream.

Draw conventions (documented so the stream is reproducible):

* ``next_u64()``   -- state = (state + 0x9E3779B97F4A7C15) mod 2^64,
                      return finalize(state).
* ``unit()``       -- next_u64() >> 11, divided by 2^53; a float in [0, 1).
* ``below(n)``     -- next_u64() mod n.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_finalize(z: int) -> int:
    """The splitmix64 output mix, on an unsigned 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit seed.

    chain = finalize(chain XOR finalize(part)) starting from chain = 0,
    with every part reduced mod 2^64 first.
    """
    chain = 0
    for part in parts:
        chain = splitmix64_finalize(chain ^ splitmix64_finalize(part & _MASK))
    return chain


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 encoding of ``text``."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


class Rng:
    """splitmix64 stream seeded with an unsigned 64-bit value."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return splitmix64_finalize(self.state)

    def unit(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / 9007199254740992.0  # 2**53

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n).  Modulo reduction; n is tiny here."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates: for i = n-1 .. 1, swap i with below(i+1)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
