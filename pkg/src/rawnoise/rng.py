"""Deterministic, splittable random-number streams.

Sampling in this package is keyed, not stateful: an :class:`RngStream` is an
immutable (seed, stream_id) pair, and every sampler that receives one always
produces the same values for it.  Callers that need fresh randomness derive
child streams with :meth:`RngStream.child` instead of advancing shared
state.  Because the underlying bit generator is counter-based (Philox),
output depends only on the key, never on scheduling, so any degree of
parallelism reproduces the sequential result bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream"]

_MASK64 = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash; stable across runs and platforms."""
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return h


def _splitmix64(x: int) -> int:
    """One splitmix64 mixing round; bijective on 64-bit integers."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """An immutable handle naming one independent random stream.

    Streams with distinct (seed, stream_id) keys are statistically
    independent.  A stream's output is a pure function of its key and the
    draw index: passing the same stream to a sampler twice yields identical
    values.  Split first, then draw.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator positioned at this stream's origin."""
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))

    def child(self, tag: int | str) -> "RngStream":
        """Derive an independent stream keyed by ``tag``.

        Tags may be integers (e.g. frame indices) or strings (e.g. component
        names).  Derivation is a bijective mix of the parent stream_id with
        the tag hash, so distinct (parent, tag) pairs collide only with
        generic 64-bit-hash probability.
        """
        if isinstance(tag, str):
            t = _fnv1a64(tag.encode("utf-8"))
        else:
            t = int(tag) & _MASK64
        mixed = _splitmix64(self.stream_id ^ _splitmix64(t))
        return RngStream(self.seed, mixed)
