"""Counter-based random streams: (seed, stream index) -> independent RNG."""

import numpy as np


def stream(seed, index=0):
    """Philox stream keyed by the run seed and a trajectory index."""
    return np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))


def streams(seed, count):
    return [stream(seed, i) for i in range(count)]
