"""Reproducible random streams.

Every random draw in the package comes from a generator keyed by
``(master_seed, replicate_index, role_tag)``. The key is folded into one
64-bit word with the SplitMix64 finalizer and handed to numpy's PCG64, so
two streams never share state and the result does not depend on which
thread consumes which replicate.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to ``x + golden`` (mod 2**64)."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def role_code(role: str | int) -> int:
    if isinstance(role, int):
        return role & _MASK64
    return zlib.crc32(role.encode("utf-8"))


def derive_seed(master_seed: int, replicate: int = 0, role: str | int = 0) -> int:
    """Mix the stream key into a 64-bit seed.

    The three components are chained through the finalizer so that
    nearby keys (replicate 0 and 1, say) land far apart.
    """
    h = splitmix64(int(master_seed) & _MASK64)
    h = splitmix64(h ^ (int(replicate) & _MASK64))
    h = splitmix64(h ^ role_code(role))
    return h


def stream(master_seed: int, replicate: int = 0, role: str | int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, replicate, role)))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return stream(int(rng))
