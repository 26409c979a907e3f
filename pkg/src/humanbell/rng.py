"""Keyed random substreams.

Every stochastic entity draws from its own generator derived from the master
seed plus a fixed integer key path (numpy ``SeedSequence`` spawn keys).  The
key depends only on the entity's identity, so adding or renaming one human
leaves every other stream untouched.
"""

from __future__ import annotations

import numpy as np

# top-level domains of the key path
COINCIDENCES = 0
INTERVENTIONS = 1
OUTCOMES = 2

_END_KEY = {"A": 0, "B": 1}


def substream(seed: int, *key: int | str) -> np.random.Generator:
    path = tuple(_END_KEY[k] if isinstance(k, str) else int(k) for k in key)
    if any(k < 0 for k in path):
        raise ValueError(f"substream keys must be non-negative, got {key}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=path)))
