"""Deterministic randomness.

All engine randomness comes from one DrawStream per engine instance.  The
contract is bit-exact: every draw consumes exactly one 64-bit word, and
bounded draws reduce that word modulo the bound.  The modular reduction has
bias at most 2**-50 for the domain sizes used here, which is far below every
statistical tolerance in the test suite, and keeping it rejection-free means
the number of words consumed per resampling is a function of the flaw alone.
That property is what makes replay and clairvoyant (shadow-engine) simulation
possible.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1


class DrawStream:
    """Seeded stream of 64-bit words with bounded-integer reduction."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._gen = random.Random(self.seed)
        self.words_drawn = 0

    def word(self) -> int:
        self.words_drawn += 1
        return self._gen.getrandbits(64)

    def below(self, n: int) -> int:
        """Uniform draw from [0, n), consuming exactly one word."""
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.word() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]
