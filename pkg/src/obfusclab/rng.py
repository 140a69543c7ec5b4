"""SplitMix64, the single source of randomness for transforms and trials.

The generator is the standard one: the state advances by the golden-gamma
constant and each output is the state passed through the mix function.
Integer ranges use ``lo + x % span`` (bias below 2^-58 for small spans).
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return _mix(self.state)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next() % (hi - lo + 1)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def sample(self, seq, k: int) -> list:
        """k distinct items, partial Fisher-Yates over a copy of ``seq``."""
        items = list(seq)
        for i in range(k):
            j = self.randint(i, len(items) - 1)
            items[i], items[j] = items[j], items[i]
        return items[:k]


def splitmix64_array(seed: int, n: int) -> np.ndarray:
    """The first ``n`` outputs of ``SplitMix64(seed)`` as a uint64 array."""
    with np.errstate(over="ignore"):
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + steps * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))
