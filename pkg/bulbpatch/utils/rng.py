"""
Seeded random streams.

All randomness flows through numpy Generators built from explicit integer
keys, so any worker can rebuild the stream for (seed, iteration, index)
without sharing state.
"""

from typing import Union

import numpy as np

RngLike = Union[int, np.random.Generator, np.random.SeedSequence]


def make_rng(state: RngLike) -> np.random.Generator:
    """Turn an int seed, SeedSequence or Generator into a Generator."""
    if isinstance(state, np.random.Generator):
        return state
    return np.random.default_rng(state)


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream derived from ``seed`` and integer keys."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]))


def draw_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit seed for a child stream."""
    return int(rng.integers(0, 2**63 - 1))
