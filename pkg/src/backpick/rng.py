"""Seeded randomness that reproduces bit-for-bit everywhere.

Python's ``random`` module does not promise stability across versions and
numpy generators are awkward to reimplement in other languages, so every
stochastic code path in this package draws from one small, fully specified
generator stack:

- ``splitmix64`` expands a 64-bit seed into generator state,
- ``xoshiro256**`` produces the 64-bit output stream,
- bounded draws are ``next_u64() % n``,
- shuffles are Fisher-Yates walking indices from high to low,
- string-derived seeds mix in the 64-bit FNV-1a hash of the UTF-8 bytes.

Any reimplementation following these five rules emits identical sequences,
which keeps recorded runs replayable outside Python as well.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash, used to fold string tags into seeds."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def seed_for_tag(seed: int, tag: str) -> int:
    """Derive a per-tag seed as ``seed XOR fnv1a64(utf8(tag))``."""
    return (seed ^ fnv1a64(tag.encode("utf-8"))) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded through splitmix64.

    The seed is reduced modulo 2^64; the four state words are the first
    four splitmix64 outputs.  The all-zero state cannot arise this way.
    """

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state = (state + 0x9E3779B97F4A7C15) & _MASK64
            z = state
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
            s.append(z ^ (z >> 31))
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform draw in [0, n). Modulo bias is < n/2^64, negligible here."""
        if n < 1:
            raise ValueError("bound must be >= 1")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, high index down to 1."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
