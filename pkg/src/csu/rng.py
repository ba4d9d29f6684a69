"""Deterministic random streams and the raw samplers built on them.

Every stochastic operation in this package draws from an RngStream, a
counter-based generator with 64-bit state (splitmix64 update + finalizer).
An identical seed replays an identical sequence, so whole augmentation
pipelines are reproducible bit-for-bit as long as the call pattern is the
same.  Child streams for independent units of work (batches, draws) are
derived from the parent seed and an index, never from mutable state, so
derivation order does not matter.

Normal variates use the basic Box-Muller transform (two uniforms -> a
cosine and a sine branch; the cosine half of each block comes first).
Gamma variates use the Marsaglia-Tsang squeeze with the usual
``G(a) = G(a + 1) * U^(1/a)`` boost for shapes below one.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)  # splitmix64 increment
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_CHILD = np.uint64(0xD2B74407B1CE6E93)  # decorrelates child-stream seeds


def _mix64(z):
    """splitmix64 finalizer; z is a uint64 scalar or array."""
    with np.errstate(over="ignore"):  # wraparound is the point
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


class RngStream:
    """Counter-based splitmix64 stream.

    The state is a single 64-bit counter advanced by a fixed odd constant;
    outputs are the avalanche-mixed counter values.  Being counter-based
    makes block draws vectorizable without changing the sequence: drawing
    n values one at a time or all at once yields the same numbers.
    """

    def __init__(self, seed):
        seed = int(seed)
        if seed < 0 or seed > _MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self._seed = seed
        self._state = seed

    @property
    def seed(self):
        return self._seed

    def child(self, index):
        """Derive an independent stream for work unit `index`.

        Children are keyed off the parent's *seed*, not its current state,
        so child(i) is the same stream no matter how much the parent has
        already produced.
        """
        index = int(index)
        if index < 0:
            raise ValueError(f"child index must be non-negative, got {index}")
        key = _mix64(np.uint64((index + 1) * int(_CHILD) & _MASK64))
        return RngStream(int(_mix64(np.uint64(self._seed) ^ key)))

    def random_u64(self, n):
        """Next n raw 64-bit outputs as a uint64 array."""
        if n < 0:
            raise ValueError("n must be non-negative")
        idx = np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
        out = _mix64(np.uint64(self._state) + idx)
        self._state = (self._state + n * int(_GOLDEN)) & _MASK64
        return out

    def uniform(self, n):
        """n doubles in [0, 1), 53-bit resolution."""
        return (self.random_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform1(self):
        return float(self.uniform(1)[0])

    def normal(self, n):
        """n i.i.d. standard normals via the basic Box-Muller transform.

        Each block of m = ceil(n/2) uniform pairs yields m cosine values
        followed by m sine values; the tail is cropped for odd n.
        """
        if n == 0:
            return np.empty(0, dtype=np.float64)
        m = (n + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1], no log(0)
        ang = (2.0 * np.pi) * u2
        return np.concatenate([r * np.cos(ang), r * np.sin(ang)])[:n]

    def gamma(self, n, shape):
        """n i.i.d. Gamma(shape, 1) draws, Marsaglia-Tsang.

        Shapes below one use the boost: draw Gamma(shape + 1) first, then
        multiply by U^(1/shape).
        """
        shape = float(shape)
        if shape <= 0.0:
            raise ValueError(f"gamma shape must be positive, got {shape}")
        if shape >= 1.0:
            return self._gamma_mt(n, shape)
        base = self._gamma_mt(n, shape + 1.0)
        u = self.uniform(n)
        return base * u ** (1.0 / shape)

    def _gamma_mt(self, n, shape):
        # Marsaglia & Tsang rejection for shape >= 1.  Rejections are rare
        # (acceptance > 95%), so the batched retry loop converges quickly
        # and consumes the stream in a deterministic round-by-round order.
        d = shape - 1.0 / 3.0
        c = 1.0 / np.sqrt(9.0 * d)
        out = np.empty(n, dtype=np.float64)
        todo = np.arange(n)
        while todo.size:
            m = todo.size
            x = self.normal(m)
            u = self.uniform(m)
            v = (1.0 + c * x) ** 3
            with np.errstate(divide="ignore", invalid="ignore"):
                ok = (v > 0.0) & (
                    (u < 1.0 - 0.0331 * x**4)
                    | (np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(v)))
                )
            out[todo[ok]] = d * v[ok]
            todo = todo[~ok]
        return out

    def permutation(self, n):
        """Uniformly random permutation of range(n) (Fisher-Yates)."""
        perm = np.arange(n)
        if n < 2:
            return perm
        u = self.uniform(n - 1)
        for i in range(n - 1, 0, -1):
            j = int(u[n - 1 - i] * (i + 1))  # floor; bias is O(2^-53 * n)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
