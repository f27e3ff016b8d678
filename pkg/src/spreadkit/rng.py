"""Portable seeded random numbers: splitmix64 seeding + xoshiro256**.

Python's ``random`` and numpy's default generators are avoided on purpose
so that generated instances and Monte Carlo streams are reproducible from
this description alone:

* ``splitmix64(x)``: ``x += 0x9E3779B97F4A7C15``; ``z = x``;
  ``z = (z ^ z>>30) * 0xBF58476D1CE4E5B9``; ``z = (z ^ z>>27) * 0x94D049BB133111EB``;
  return ``z ^ z>>31`` (all mod 2**64).
* the four xoshiro256** state words are four successive splitmix64 outputs
  starting from the seed;
* doubles are ``(next >> 11) * 2**-53``;
* ``randbelow(m)`` rejects draws above the largest multiple of ``m``.

:func:`stream_seed` derives independent sub-stream seeds (one per Monte
Carlo trial) as ``splitmix64(seed ^ splitmix64(index + 1))``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return state, z ^ (z >> 31)


def splitmix64(x: int) -> int:
    return splitmix64_next(x & MASK64)[1]


def stream_seed(seed: int, index: int) -> int:
    return splitmix64((seed & MASK64) ^ splitmix64(index + 1))


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** generator (scalar, pure Python)."""

    def __init__(self, seed: int):
        state = seed & MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64_next(state)
            s.append(out)
        self.s = s

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, m: int) -> int:
        if m <= 0:
            raise ValueError("randbelow needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % m

    def sample(self, population: list, k: int) -> list:
        """``k`` distinct items via a partial Fisher-Yates shuffle."""
        pool = list(population)
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


# -- vectorised: one independent xoshiro256** stream per lane -------------

_U = np.uint64


def _np_splitmix_next(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    state = state + _U(GOLDEN)
    z = state.copy()
    z = (z ^ (z >> _U(30))) * _U(_M1)
    z = (z ^ (z >> _U(27))) * _U(_M2)
    return state, z ^ (z >> _U(31))


def _np_rotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << _U(k)) | (x >> _U(64 - k))


class LaneStreams:
    """Many xoshiro256** generators advanced in lockstep with numpy.

    Lane ``i`` is seeded with ``stream_seed(seed, first + i)``, so a lane's
    numbers depend only on (seed, global lane index), not on how lanes are
    batched. Lane ``i`` of a batch reproduces ``Xoshiro256(stream_seed(seed, first + i))``.
    """

    def __init__(self, seed: int, first: int, count: int):
        idx = np.arange(first + 1, first + count + 1, dtype=np.uint64)
        _, mixed = _np_splitmix_next(idx)
        _, lane_seed = _np_splitmix_next(mixed ^ _U(seed & MASK64))
        state = lane_seed
        words = []
        for _ in range(4):
            state, out = _np_splitmix_next(state)
            words.append(out)
        self.s0, self.s1, self.s2, self.s3 = words

    def next_u64(self) -> np.ndarray:
        result = _np_rotl(self.s1 * _U(5), 7) * _U(9)
        t = self.s1 << _U(17)
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _np_rotl(self.s3, 45)
        return result

    def random(self) -> np.ndarray:
        return (self.next_u64() >> _U(11)).astype(np.float64) * (1.0 / (1 << 53))
