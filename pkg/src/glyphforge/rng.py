"""Seeded random streams.

All randomness in the toolkit flows from a single 64-bit seed through
counter-based Philox generators.  Independent streams are derived by
spawn keys, so any fixture is reproducible from (seed, stream labels)
alone, in any order of use.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Return a Philox generator for the given seed and stream path.

    ``make_rng(seed, a, b)`` and ``make_rng(seed, a, c)`` are
    statistically independent for ``b != c``.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
