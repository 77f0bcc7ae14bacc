"""Deterministic random numbers for sampling, corruption, and bootstrapping.

Everything that draws randomness in this package goes through SplitMix64 so
that subsets, corruptions, and bootstrap resamples are reproducible from a
seed across platforms and implementations. The generator is the standard
splitmix64 sequence:

    state   <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z       <- state
    z       <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z       <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output  <- z XOR (z >> 31)

Derived conveniences, also part of the documented contract:

* ``next_float()``  = ``next_u64() >> 11`` times ``2**-53`` (uniform in [0, 1)).
* ``next_below(n)`` = ``(next_u64() * n) >> 64`` (multiply-shift bounded draw).
* ``derive(seed, k)`` = the k-th raw output of a splitmix64 stream seeded with
  ``seed``; used to give parallel workers (e.g. bootstrap resamples)
  independent, order-free child seeds.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive(seed: int, index: int) -> int:
    """Return the ``index``-th (0-based) output of splitmix64 seeded with ``seed``."""
    return _mix((seed + (index + 1) * _GAMMA) & _MASK)


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def next_uniform(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi)."""
        return lo + (hi - lo) * self.next_float()
