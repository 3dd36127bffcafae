"""SplitMix64 (Steele, Lea, Flood 2014) with the standard published constants.

Kept self-contained so sweep rows can be reproduced bit-for-bit from any
language: row ``r`` of a sweep seeded with ``s`` draws from
``SplitMix64(s).split(r)``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = self.seed

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` by rejection (no modulo bias)."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty range [{lo}, {hi}]")
        limit = (1 << 64) - (1 << 64) % span
        while True:
            r = self.next_u64()
            if r < limit:
                return lo + r % span

    def sample(self, population: int, k: int) -> list[int]:
        """``k`` distinct values from ``range(population)`` (partial Fisher-Yates)."""
        pool = list(range(population))
        for i in range(k):
            j = self.randint(i, population - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def split(self, index: int) -> SplitMix64:
        """Independent child stream number ``index``."""
        return SplitMix64(mix64((self.seed + (index + 1) * GAMMA) & MASK64))
