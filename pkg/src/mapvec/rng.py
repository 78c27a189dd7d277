"""Deterministic splitmix64 random streams.

Every stochastic component in the package (parameter initialization,
synthetic scenes, jitter) draws from this generator so that a given seed
reproduces identical artifacts across platforms and numpy versions.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SeededRng:
    """splitmix64 stream: state advances by the golden-ratio increment.

    The scalar and vectorized paths produce the same stream: ``fill_u64(n)``
    yields exactly the next n values of repeated ``next_u64()`` calls.
    """

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def fill_u64(self, n: int) -> np.ndarray:
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self._state) + steps * np.uint64(_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * _GAMMA) & _MASK64
        return z

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform draw in [lo, hi) with 53-bit resolution."""
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        u = (self.fill_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return lo + (hi - lo) * u

    def normals(self, n: int, sigma: float = 1.0) -> np.ndarray:
        """n gaussian draws via Box-Muller; consumes exactly 2n uniforms."""
        u = self.uniforms(2 * n)
        radius = np.sqrt(-2.0 * np.log1p(-u[:n]))
        return sigma * radius * np.cos(2.0 * math.pi * u[n:])

    def poisson(self, rate: float) -> int:
        """Knuth's product-of-uniforms sampler; adequate for small rates."""
        if rate <= 0.0:
            return 0
        limit = math.exp(-rate)
        k = 0
        p = 1.0
        while True:
            p *= self.uniform()
            if p <= limit:
                return k
            k += 1
