"""Seed handling.

Every run derives its generators from one 64-bit seed. Streams are split with
:class:`numpy.random.SeedSequence` spawn keys and drive a Philox (counter-based)
bit generator, so a stream identified by ``(seed, *keys)`` is reproducible
regardless of what other streams were drawn before it.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for stream ``keys`` under the root ``seed``."""
    ss = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(seed_or_rng)
