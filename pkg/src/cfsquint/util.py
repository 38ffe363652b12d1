"""Small numeric helpers used throughout the package."""

from __future__ import annotations

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s, exact


def unit_phasor(cycles):
    """Return exp(-2j*pi*cycles) with the argument reduced modulo one cycle.

    Propagation phases here routinely reach 1e4..1e5 cycles (e.g. distance over
    wavelength at 28 GHz); reducing before exponentiation keeps the phase error
    at the fractional-part resolution instead of growing with the cycle count.
    Accepts scalars or arrays.
    """
    return np.exp(-2j * np.pi * np.mod(cycles, 1.0))


# Stream tags keep independently seeded draws from ever sharing a Philox key.
PATH_STREAM = 1
SYMBOL_STREAM = 2
TRIAL_STREAM = 3


def substream(seed: int, stream: int, index: int) -> np.random.Generator:
    """Counter-based RNG substream: (seed, stream) keys Philox, index sets the
    top counter word.

    Substreams are separated by 2^192 draws, so any enumeration order of the
    indices yields the same values per index. This is what makes path sets,
    OFDM symbol draws, and Monte-Carlo trials independent of loop or schedule
    order.
    """
    key = np.array([seed % (1 << 64), stream % (1 << 64)], dtype=np.uint64)
    counter = np.array([0, 0, 0, index % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
