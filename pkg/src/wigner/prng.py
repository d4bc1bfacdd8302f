"""Counter-based SplitMix64 generator with Box-Muller complex Gaussians.

Output ``k`` (0-based) of a stream seeded with ``s`` is
``mix(s + (k + 1) * GAMMA)`` with arithmetic mod 2**64, where ``mix`` is the
SplitMix64 finalizer::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Uniform doubles take the top 53 bits: ``u = (x >> 11) * 2**-53`` in [0, 1).
A complex Gaussian consumes two uniforms ``u1, u2``::

    r = sqrt(-log(1 - u1))           # so E|z|^2 = 1
    z = r * (cos(2 pi u2) + i sin(2 pi u2))

i.e. real and imaginary parts are independent N(0, 1/2).
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed; order-sensitive."""
    h = 0x243F6A8885A308D3
    for p in parts:
        h = mix64(h ^ mix64((int(p) & MASK64) + GAMMA))
    return h


def _mix_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class Prng:
    """Deterministic 64-bit stream; identical seeds give identical streams."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.counter = 0

    def next_u64(self, size: int) -> np.ndarray:
        k = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.seed) + k * np.uint64(GAMMA)
        self.counter += size
        return _mix_array(states)

    def uniform(self, size: int) -> np.ndarray:
        x = self.next_u64(size)
        return (x >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def complex_normal(self, shape) -> np.ndarray:
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape))
        u = self.uniform(2 * n)
        r = np.sqrt(-np.log1p(-u[0::2]))
        z = r * np.exp(2j * np.pi * u[1::2])
        return z.reshape(shape)

    def unit_vectors(self, count: int, dim: int) -> np.ndarray:
        """``count`` Haar-uniform unit vectors in C^dim, as rows."""
        z = self.complex_normal((count, dim))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    def phase(self) -> float:
        return float(2.0 * np.pi * self.uniform(1)[0])
