"""Reproducible random streams.

Every stream is a Philox generator keyed by ``(seed, purpose, *indices)``,
so a trial batch, capacity chunk or search candidate sees the same numbers
regardless of how work is scheduled across threads.
"""

import numpy as np

# purpose tags, first element of every spawn key
CO_CANDIDATES = 0
CAPACITY = 1
SER = 2
SEMIBLIND = 3
FUZZ = 4


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the given seed and non-negative integer key."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def crandn(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with variance `var`."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
