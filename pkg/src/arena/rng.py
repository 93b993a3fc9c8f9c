"""Random streams.

Everything draws from numpy ``Generator(PCG64)`` objects.  The kernels read
raw 64-bit words from the same bit generator; the helpers here apply the
identical word-to-number mapping so Python-side sampling and kernel-side
sampling agree.
"""

import numpy as np

_INV53 = 1.0 / 9007199254740992.0


def make_rng(*keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in keys])))


def uniform(rng: np.random.Generator) -> float:
    """Uniform double in [0, 1) from one raw word."""
    return (rng.bit_generator.random_raw() >> 11) * _INV53


def below(rng: np.random.Generator, n: int) -> int:
    """Integer in [0, n) from one raw word."""
    return ((rng.bit_generator.random_raw() >> 11) * n) >> 53
