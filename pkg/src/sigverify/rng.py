"""Seedable splitmix64 random generator.

Experiment repeatability has to survive platform, interpreter and library
upgrades, so the sampling used for protocol splits and the synthetic corpus
runs on a fixed 64-bit splitmix scrambler instead of a library RNG whose
stream may change between releases.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def mix64_doubles(indices: np.ndarray, seed: int) -> np.ndarray:
    """Vectorized splitmix scramble of integer indices into [0, 1) doubles.

    Counter-based, so any pixel grid or index array can be filled with
    portable noise in one shot. Unsigned numpy arithmetic wraps mod 2^64,
    matching the scalar generator's masking.
    """
    z = (np.asarray(indices, dtype=np.uint64) + np.uint64(1)) * np.uint64(_GAMMA)
    z += np.uint64(seed & _MASK64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class SplitMix64:
    """Deterministic 64-bit generator with a fixed, documented stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def spawn(self, *keys: int) -> "SplitMix64":
        """Derive an independent child stream from integer keys.

        Same parent seed and keys always give the same child, regardless of
        how many values the parent has produced.
        """
        z = self._state
        for k in keys:
            z = _mix((z ^ (k & _MASK64)) + _GAMMA & _MASK64)
        return SplitMix64(z)

    def random(self) -> float:
        # 53 uniform bits -> double in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            u = self.next_u64()
            if u <= limit:
                return u % n

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.randrange(hi - lo + 1)

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), order randomized."""
        if k > n:
            raise ValueError(f"cannot sample {k} from {n}")
        pool = list(range(n))
        self.shuffle(pool)
        return pool[:k]

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller, one draw per call; the discarded twin keeps the
        # stream position independent of caller pairing.
        u1 = self.random()
        u2 = self.random()
        while u1 <= 0.0:
            u1 = self.random()
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
