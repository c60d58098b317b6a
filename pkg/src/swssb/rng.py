"""Seeded random streams.

All randomness goes through Philox (a counter-based generator) keyed by a
master seed plus an integer path, e.g. ``stream(seed, p_index, sample)``.
Streams for different paths are independent and do not depend on how many
threads consume them, which keeps parallel runs reproducible.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "philox4x64-numpy"


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
