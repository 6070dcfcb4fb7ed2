"""Deterministic random number generation.

All stochastic output in this package flows through :class:`SplitMix64`, a
seedable 64-bit generator with a fixed output sequence on every platform.
Draw ``k`` of the stream is ``mix64(seed + (k+1) * GAMMA)`` with the usual
SplitMix64 finalizer, which makes batch generation a pure vectorized
function of the draw counter. Gaussian variates come from the basic
Box-Muller transform applied to consecutive uniform draws, so the entire
stochastic path of a run is pinned by the seed alone.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


class SplitMix64:
    """Sequential deterministic RNG; one instance is one stream."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._drawn = 0

    def uint64(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit outputs of the stream."""
        idx = np.arange(self._drawn + 1, self._drawn + count + 1, dtype=np.uint64)
        self._drawn += count
        with np.errstate(over="ignore"):
            z = _U64(self.seed) + idx * _GAMMA
            z = (z ^ (z >> _U64(30))) * _MIX1
            z = (z ^ (z >> _U64(27))) * _MIX2
            return z ^ (z >> _U64(31))

    def uniform(self, count: int) -> np.ndarray:
        """Uniform draws in (0, 1], 53-bit resolution (never 0, log-safe)."""
        bits = self.uint64(count) >> _U64(11)
        return (bits.astype(np.float64) + 1.0) * 2.0**-53

    def normals(self, count: int) -> np.ndarray:
        """Standard normals via Box-Muller on consecutive uniform pairs.

        Pair k consumes uniforms (2k, 2k+1) and yields
        sqrt(-2 ln u1) * (cos, sin)(2 pi u2); outputs are interleaved and
        truncated to ``count``, so an odd request still consumes a whole
        pair of uniforms.
        """
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]

    def uniform_symmetric(self, count: int) -> np.ndarray:
        """Zero-mean, unit-variance uniforms on (-sqrt(3), sqrt(3)]."""
        return (2.0 * self.uniform(count) - 1.0) * np.sqrt(3.0)

    def integers(self, count: int, upper: int) -> np.ndarray:
        """Draws from {0, ..., upper-1} by 64-bit modulo (bias < 2**-50 here)."""
        return (self.uint64(count) % _U64(upper)).astype(np.int64)
