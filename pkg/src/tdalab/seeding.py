"""Deterministic random-number plumbing.

Every random choice in the library flows from a single 64-bit master seed.
Per-item generators are derived by mixing the master seed with an integer
key path through ``numpy.random.SeedSequence``, so items are independent
and their order is stable no matter how a dataset is iterated or which
items are regenerated in isolation.
"""

from __future__ import annotations

import numpy as np


def derive_seed(master_seed: int, *key: int) -> int:
    """Mix a master seed with an integer key path into a new 64-bit seed."""
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generator(master_seed: int, *key: int) -> np.random.Generator:
    """Return a fresh Generator for (master_seed, *key)."""
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
