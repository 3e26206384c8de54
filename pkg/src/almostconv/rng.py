"""Portable seeded randomness for corpus generation and probe construction.

The generator is splitmix64: a 64-bit state advances by the odd constant
0x9E3779B97F4A7C15 on every draw, and the output is the new state mixed by
two xorshift-multiply rounds with constants 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB (shifts 30, 27, 31).  Any implementation using these
constants reproduces the generated corpora bit for bit, independent of
platform, which is the whole point of not reaching for a library RNG here.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic 64-bit stream; uniform doubles use the top 53 bits."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform draw in [0, 1) with full 53-bit double resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniforms(self, count: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(count)])

    def spawn(self) -> "SplitMix64":
        """Child stream seeded by the next draw; keeps instance seeds independent."""
        return SplitMix64(self.next_u64())
