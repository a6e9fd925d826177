"""Portable seeded randomness.

Every random decision in the perturbations goes through :class:`SeededRng`,
a SplitMix64 generator (Steele, Lea & Flood 2014). It is defined entirely by
integer arithmetic modulo 2**64, so the draw sequence for a given seed is the
same on every platform and in any language that reimplements it.

Derived draws are pinned down as well:

* ``below(n)`` rejects raw outputs under ``2**64 mod n`` and returns the rest
  modulo ``n`` (unbiased).
* ``random()`` uses the top 53 bits: ``(x >> 11) * 2**-53``.
* ``permutation(n)`` is Durstenfeld's Fisher-Yates, walking ``i`` from
  ``n - 1`` down to ``1`` and swapping with ``j = below(i + 1)``.
* ``sample(n, k)`` is a partial forward Fisher-Yates: for ``i in 0..k-1`` swap
  position ``i`` with ``i + below(n - i)``; the first ``k`` entries are
  returned in draw order.
"""

from __future__ import annotations

import hashlib

ALGORITHM = "splitmix64"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SeededRng:
    algorithm = ALGORITHM

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._state = seed

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 bits of resolution."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def permutation(self, n: int) -> list[int]:
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct indices from ``range(n)``, in draw order."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary parts, e.g. ``(global_seed, story_id, kind)``.

    BLAKE2b over the NUL-joined ``str`` of each part, first 8 digest bytes read
    little-endian.
    """
    payload = "\x00".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def round_half_up(x: float) -> int:
    """Round to nearest integer, halves away from zero for ``x >= 0``.

    Python's ``round`` uses banker's rounding, which would make edit counts
    disagree with other implementations at exact halves.
    """
    return int(x + 0.5)
