"""Counter-based random number generation.

Every stochastic component in this package draws from the same generator:
SplitMix64 run in counter mode.  The k-th raw output for key `s` is

    mix64(s + (k + 1) * GAMMA)

where GAMMA = 0x9E3779B97F4A7C15 and mix64 is the SplitMix64 finalizer
(xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift 27, multiply
0x94D049BB133111EB, xor-shift 31), all in 64-bit wrapping arithmetic.
Uniform doubles take the top 53 bits of the raw output divided by 2**53,
giving values in [0, 1).

Because outputs are a pure function of (key, counter), streams can be
generated in any chunking, vectorised with numpy, or reproduced inside a
compiled kernel, and results are identical across platforms and library
versions.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

_U_GAMMA = np.uint64(_GAMMA)
_U_MULT1 = np.uint64(_MULT1)
_U_MULT2 = np.uint64(_MULT2)
_INV_2_53 = 1.0 / float(1 << 53)


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a Python int (wrapping 64-bit)."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _MULT1) & _MASK
    x = ((x ^ (x >> 27)) * _MULT2) & _MASK
    return x ^ (x >> 31)


def derive_seed(seed: int, *tags: int | str) -> int:
    """Fold tags into a seed, producing an independent child key.

    String tags are hashed byte-by-byte (FNV-1a, 64-bit) so derivation does
    not depend on Python's randomized `hash`.
    """
    key = mix64(seed)
    for tag in tags:
        if isinstance(tag, str):
            h = 0xCBF29CE484222325
            for b in tag.encode("utf-8"):
                h = ((h ^ b) * 0x100000001B3) & _MASK
            tag = h
        key = mix64(key ^ mix64(tag))
    return key


class CounterRng:
    """Deterministic stream of uniforms keyed by (seed, tags).

    The counter advances with each draw; a given (key, counter) pair always
    yields the same value regardless of how draws are batched.
    """

    def __init__(self, seed: int, *tags: int | str):
        self.key = derive_seed(seed, *tags)
        self.counter = 0

    def raw(self, n: int) -> np.ndarray:
        """Next n raw uint64 outputs (vectorised)."""
        ctr = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        x = np.uint64(self.key) + ctr * _U_GAMMA
        x = (x ^ (x >> np.uint64(30))) * _U_MULT1
        x = (x ^ (x >> np.uint64(27))) * _U_MULT2
        return x ^ (x >> np.uint64(31))

    def uniforms(self, n: int) -> np.ndarray:
        """Next n doubles in [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniform(self, low: float, high: float, n: int) -> np.ndarray:
        return low + (high - low) * self.uniforms(n)

    def integers(self, n: int, bound: int) -> np.ndarray:
        """Next n ints in [0, bound) via floor(u * bound).

        Bias is at most bound / 2**53, negligible for the bounds used here
        (topic counts, vocabulary sizes).
        """
        return np.minimum((self.uniforms(n) * bound).astype(np.int64), bound - 1)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) by sorting random keys."""
        return np.argsort(self.raw(n), kind="stable")

    def shuffled(self, items):
        """Items reordered by a deterministic permutation."""
        order = self.permutation(len(items))
        return [items[i] for i in order]
