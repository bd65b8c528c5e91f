"""Counter-based deterministic random number generator.

The generator is a SplitMix64-style counter design: draw ``i`` from seed
``s`` is ``mix64(s + (i+1) * GOLDEN)`` where ``mix64`` is the standard
64-bit finalizer (xor-shift / multiply twice / xor-shift).  All arithmetic
is modulo 2**64, so the sequence depends only on (seed, counter) and is
identical on every platform and in every backend.  Floats are built from
the top 53 bits, giving uniforms in [0, 1).
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class RngState:
    """Deterministic RNG owned by a single decoding or training run.

    Mutable state is just the draw counter; `spawn` derives an independent
    substream without touching the parent's counter, so fan-out across
    samples or contexts stays reproducible regardless of consumption order.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & MASK64
        self.counter = counter

    def next_uint64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * GOLDEN) & MASK64)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_uint64() >> 11) * _INV53

    def next_floats(self, n: int) -> np.ndarray:
        """Vectorized batch of `next_float` draws (bit-identical to n scalar calls)."""
        counters = self.counter + 1 + np.arange(n, dtype=np.uint64)
        self.counter += n
        z = (np.uint64(self.seed) + counters * np.uint64(GOLDEN)) & np.uint64(MASK64)
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)) & np.uint64(MASK64)
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)) & np.uint64(MASK64)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)).astype(np.float64) * _INV53

    def uniform_array(self, shape: tuple[int, ...], low: float, high: float) -> np.ndarray:
        n = int(np.prod(shape, dtype=np.int64)) if shape else 1
        return (low + (high - low) * self.next_floats(n)).reshape(shape)

    def spawn(self, index: int) -> "RngState":
        """Independent substream `index` of this generator's seed."""
        child = mix64(mix64(self.seed) ^ ((index + 1) * GOLDEN & MASK64))
        return RngState(child)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed:#x}, counter={self.counter})"
