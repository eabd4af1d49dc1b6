"""Seeded simulation randomness.

All simulation randomness comes from numpy's PCG64 (128-bit state, period
2**128). Independent substreams are derived from ``(seed, stream)`` through
``SeedSequence`` spawn keys, so stages, sweep points and calibration blocks
never share a stream.
"""

import numpy as np

# Substream indices reserved inside one seed.
DETECTION_STREAM = 0
PHASE_STREAM = 1

_OPEN_UNIFORM_BITS = 52


def make_generator(seed: int, stream: int = DETECTION_STREAM) -> np.random.Generator:
    """Return a PCG64 generator for substream ``stream`` of ``seed``."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a child 64-bit seed from ``seed`` and a path of integer keys."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Draw uniforms from the open interval (0, 1).

    Values are ``(k + 1/2) / 2**52`` for integer ``k`` in ``[0, 2**52)``;
    every value is exactly representable, so neither 0 nor 1 can appear.
    """
    k = rng.integers(0, 1 << _OPEN_UNIFORM_BITS, size=size, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) * (2.0**-_OPEN_UNIFORM_BITS)
