"""Deterministic randomness helpers.

Counter-based Philox streams keyed by a splitmix-style hash of
(seed, subkey...) give per-machine / per-stage independence that does not
depend on iteration order, which the rounding algorithms rely on.
"""

import numpy as np

from ._rat import Rat

_MASK64 = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Combine integers into one well-mixed 64-bit key (splitmix64 finalizer)."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        h = (h ^ (part & _MASK64)) * 0xBF58476D1CE4E5B9 & _MASK64
        h = (h ^ (h >> 27)) * 0x94D049BB133111EB & _MASK64
        h ^= h >> 31
    return h


def philox(key: int) -> np.random.Generator:
    """A fresh counter-based generator for the given 64-bit key."""
    return np.random.Generator(np.random.Philox(key=key & _MASK64))


def unit_rat(gen: np.random.Generator):
    """Exact uniform rational in [0, 1): a 64-bit draw over 2**64."""
    return Rat(int(gen.integers(0, 1 << 64, dtype=np.uint64)), 1 << 64)
