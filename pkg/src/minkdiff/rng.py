"""SplitMix64 generator.

Kept tiny and explicit so the sampled fixtures can be reproduced from any
language. Update rule (all arithmetic mod 2**64)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

Uniform doubles use the top 53 bits: ``(next() >> 11) * 2**-53``.
"""

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed=0):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self, size=None):
        if size is None:
            return (self.next_u64() >> 11) * 2.0**-53
        n = int(np.prod(size))
        out = np.array([(self.next_u64() >> 11) * 2.0**-53 for _ in range(n)])
        return out.reshape(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return low + (high - low) * self.random(size)

    def integers(self, low, high):
        """Integer in [low, high)."""
        return low + int(self.random() * (high - low))

    def normal(self, size=None):
        # Box-Muller, one pair per draw
        n = 1 if size is None else int(np.prod(size))
        u1 = 1.0 - self.random(n)
        u2 = self.random(n)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return float(z[0]) if size is None else z.reshape(size)

    def unit_vectors(self, n):
        v = self.normal((n, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
