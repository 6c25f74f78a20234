"""Portable 64-bit pseudo-random generation.

The generator is xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
Everything is plain integer arithmetic masked to 64 bits, so a given seed
produces the same stream on every platform.

    state update (s0..s3, all uint64):
        result = rotl(s1 * 5, 7) * 9
        t  = s1 << 17
        s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
        s2 ^= t;  s3 = rotl(s3, 45)

    splitmix64(z):
        z += 0x9E3779B97F4A7C15
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

Uniform reals in [0, 1) use the top 53 bits: ``(next() >> 11) * 2**-53``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(z: int) -> int:
    """One SplitMix64 output for counter value ``z`` (already advanced)."""
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed, order-sensitively."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h


class Xoshiro256:
    """xoshiro256** generator."""

    __slots__ = ("s",)

    def __init__(self, seed: int):
        z = int(seed) & MASK64
        state = []
        for _ in range(4):
            state.append(splitmix64(z))
            z = (z + _GOLDEN) & MASK64
        if not any(state):
            state[0] = 1
        self.s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def bit(self) -> int:
        """The top bit of the next output."""
        return self.next_u64() >> 63
