"""
Seeded random streams.

Every stream is numpy's PCG64 bit generator seeded through a SeedSequence
built from ``(seed, purpose, index...)``. The streams are therefore
reproducible across platforms, and a shot's draws depend only on its own
index, not on how shots are spread over worker threads.
"""

from enum import IntEnum
from typing import List, Union

import numpy as np

RngLike = Union[int, np.random.Generator]


class Stream(IntEnum):
    """Purpose tags that keep independent streams apart for the same seed."""

    SAMPLING = 0
    ORDERING = 1
    GENERATOR = 2


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a PCG64 generator for the stream identified by ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *key])))


def as_rng(rng: RngLike, stream: Stream) -> np.random.Generator:
    """Accept either a ready generator or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(int(rng), int(stream))


def standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """
    Draw ``n`` standard normal values with the Box-Muller transform.

    Each value uses two fresh uniforms u1, u2 in [0, 1) and takes the cosine
    branch: sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
    """
    u1 = rng.random(n)
    u2 = rng.random(n)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def random_permutation(rng: np.random.Generator, n: int) -> List[int]:
    """Uniformly random permutation of 0..n-1 (numpy's Fisher-Yates shuffle)."""
    return [int(v) for v in rng.permutation(n)]
