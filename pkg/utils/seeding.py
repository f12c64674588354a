# utils/seeding.py

import numpy as np

SEED_MAX = 2 ** 64

# Stream identifiers keep link noise, sweeps and payload generation apart
STREAM_PAYLOAD = 0
STREAM_LINK_POINT = 1
STREAM_SNR_POINT = 2
STREAM_ANGLE_SWEEP = 3


def check_seed(seed):
    """Validate a 64-bit run seed."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"Seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < SEED_MAX:
        raise ValueError(f"Seed must fit in 64 bits, got {seed}")
    return int(seed)


def point_rng(seed, stream, index=0):
    """
    Generator for one sweep point.

    The child state depends only on (seed, stream, index), so points can be
    evaluated in any order or process and still draw the same numbers.
    """
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=(int(stream), int(index)))
    return np.random.Generator(np.random.Philox(sequence))
