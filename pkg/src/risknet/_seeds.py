"""Deterministic PRNG stream derivation.

Every stochastic routine in the package owns an independent numpy
Generator derived from an integer base seed plus a fixed salt/path, so
results never depend on call order or worker scheduling.
"""

from __future__ import annotations

import numpy as np

# Stage salts keep streams for different pipeline stages decorrelated
# even when they share a base seed.
GRAPH_SAMPLING = 1
MODULE_DETECTION = 2
CASCADE = 3
BASELINE = 4
SENSITIVITY = 5
CONSENSUS = 6


def derive_rng(*path: int) -> np.random.Generator:
    """Return a Generator seeded from the integer tuple ``path``.

    All entries must be non-negative integers; the same path always
    yields the same stream.
    """
    for entry in path:
        if entry < 0:
            raise ValueError(f"seed path entries must be non-negative, got {entry}")
    return np.random.default_rng(tuple(int(entry) for entry in path))
