"""Seeded random streams.

All randomness goes through Philox4x64, a counter-based generator whose
output is bit-identical across platforms for a given key. A stream is
identified by the caller's seed plus an optional tuple of integer tags, so
independent consumers (edge weights, noise per trial, probe vectors) never
share state and results do not depend on evaluation order.
"""

import numpy as np


def generator(seed, *stream):
    """Return a ``numpy.random.Generator`` for ``(seed, *stream)``.

    ``seed`` is a non-negative integer or a sequence of them (a derived
    per-trial seed); stream tags are non-negative integers.
    """
    head = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    words = [int(s) for s in (*head, *stream)]
    if any(w < 0 for w in words):
        raise ValueError(f"seeds and stream tags must be non-negative, got {words}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))
