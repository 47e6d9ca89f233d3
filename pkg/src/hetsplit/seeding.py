"""Deterministic 64-bit seed derivation.

Every source of randomness in the package is a numpy Generator seeded with
a value derived from a master seed through `mix64`, so results are
independent of execution order and worker count.
"""
from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _avalanche(x: int) -> int:
    # splitmix64 finalizer
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def mix64(*parts: int) -> int:
    """Mix any number of integers into one 64-bit seed.

    Absorbs each part with a splitmix64 round; full avalanche per part, so
    nearby inputs (consecutive replication or split indices) produce
    unrelated outputs.
    """
    h = 0
    for p in parts:
        h = _avalanche((h + _GOLDEN + (int(p) & _MASK64)) & _MASK64)
    return h


def rng_from(*parts: int) -> np.random.Generator:
    """A numpy Generator deterministically derived from the given parts."""
    return np.random.default_rng(mix64(*parts))
