"""Reproducible random streams.

One master seed drives everything.  Each replication gets an independent
stream via ``SeedSequence(master, spawn_key=(rep,))``; named substreams
within a replication use ``spawn_key=(rep, substream)``.  The mapping is a
pure function of (master, rep, substream), so results do not depend on
scheduling order or degree of parallelism.

Per-(AP, pixel) channel gains cannot be drawn ahead of time (there can be
billions of pairs), so they are generated on the fly from a counter-based
splitmix64 hash of (stream seed, pair counter).  The same hash is
implemented here in pure Python and inside the numba kernels; a unit test
pins their bit-for-bit equality.
"""

from __future__ import annotations

import math

import numpy as np

# substream labels inside one replication
STREAM_POINTS = 0
STREAM_TIERS = 1
STREAM_GAINS = 2
STREAM_PIXEL_GAINS = 3

_MASK64 = (1 << 64) - 1

GAIN_DETERMINISTIC = 0
GAIN_LOGNORMAL = 1
GAIN_EXPONENTIAL = 2


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def generator(seed) -> np.random.Generator:
    """Make a Generator from an int seed or a SeedSequence."""
    return np.random.Generator(np.random.PCG64(as_seed_sequence(seed)))


def replication_stream(master_seed: int, rep: int, substream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(rep, substream))


def replication_generator(master_seed: int, rep: int, substream: int) -> np.random.Generator:
    return generator(replication_stream(master_seed, rep, substream))


def stream_seed64(master_seed: int, rep: int, substream: int) -> int:
    """A single 64-bit seed word for the counter-based gain hash."""
    ss = replication_stream(master_seed, rep, substream)
    return int(ss.generate_state(1, np.uint64)[0])


def splitmix64(z: int) -> int:
    """Reference splitmix64 finalizer (pure Python, 64-bit wrapping)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash_uniform(seed: int, counter: int) -> float:
    """Uniform in (0, 1) from a 64-bit seed and a pair counter."""
    h = splitmix64((seed + counter) & _MASK64)
    return ((h >> 11) + 0.5) / 9007199254740992.0  # 2**53


def pair_gain(seed: int, counter: int, kind: int, sigma: float, scale: float) -> float:
    """Channel gain for one (AP, pixel) pair.

    counter must be unique per pair; two uniforms are consumed at
    2*counter and 2*counter + 1.  Lognormal gains use Box-Muller so the
    numba twin needs no erfinv.
    """
    if kind == GAIN_DETERMINISTIC:
        return 1.0
    u1 = hash_uniform(seed, 2 * counter)
    if kind == GAIN_EXPONENTIAL:
        return -scale * math.log(u1)
    u2 = hash_uniform(seed, 2 * counter + 1)
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(6.283185307179586 * u2)
    return math.exp(sigma * z)
