"""Monte Carlo checks for the spread-set covering bound and random 2-colourings.

Trial ``i`` always draws from the xoshiro256** stream
``stream_seed(seed, i)`` (see :mod:`spreadkit.rng`), one uniform double per
ground element ``1..N`` in increasing order. Results therefore depend only
on ``(seed, trials)``, not on how trials are split across worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .faces import Face, InvalidArgument, SetFamily
from .rng import LaneStreams
from .spreadness import is_r_spread

BLOCK = 1 << 14


@dataclass(frozen=True)
class TrialOutcome:
    trials: int
    successes: int
    estimate: float
    std_err: float
    bound: Optional[float]
    seed: int
    p: float
    side_rates: Optional[tuple[float, float]] = None

    @property
    def vacuous(self) -> bool:
        return self.bound is None or self.bound <= 0

    @property
    def consistent(self) -> bool:
        """Estimate plus three standard errors reaches the guaranteed bound."""
        return self.vacuous or self.estimate + 3 * self.std_err >= self.bound

    @property
    def both_sides_above_half(self) -> Optional[bool]:
        if self.side_rates is None:
            return None
        return min(self.side_rates) > 0.5


def _outcome(trials, successes, bound, seed, p, side_rates=None) -> TrialOutcome:
    est = successes / trials
    return TrialOutcome(trials, successes, est, math.sqrt(est * (1 - est) / trials),
                        bound, seed, p, side_rates)


def _blocks(trials: int):
    return [(s, min(BLOCK, trials - s)) for s in range(0, trials, BLOCK)]


def _run_blocks(fn, trials: int, threads: int):
    blocks = _blocks(trials)
    if threads <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def _member_words(fam_members) -> list[np.uint64]:
    # Element e lives at bit e-1 so that element 64 still fits a uint64.
    return [np.uint64(f >> 1) for f in fam_members]


def _hits(w: np.ndarray, words: list[np.uint64]) -> np.ndarray:
    hit = np.zeros(w.shape, dtype=bool)
    for f in words:
        hit |= (w & f) == f
    return hit


def cover_bound(r, m: float, delta: float, k: int) -> float:
    """``1 - (5 / log2(r*delta))**m * k`` (may be <= 0, i.e. vacuous)."""
    rd = float(Fraction(r)) * delta
    if rd <= 1:
        raise InvalidArgument("need r * delta > 1")
    return 1.0 - (5.0 / math.log2(rd)) ** m * k


def spread_cover_probability(fam: SetFamily, r, m: float, delta: float,
                             trials: int, seed: int, threads: int = 1) -> TrialOutcome:
    """Estimate Pr[some member lies inside a (m*delta)-random set].

    ``bound`` is None when ``r * delta <= 1``, where the guarantee is undefined.
    """
    if not fam:
        raise InvalidArgument("family must be non-empty")
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    p = m * delta
    if not 0 <= p <= 1:
        raise InvalidArgument(f"m * delta = {p} is not a probability")
    if not is_r_spread(fam, r):
        raise InvalidArgument(f"family is not {Fraction(r)}-spread")
    # With r * delta <= 1 the bound's logarithm is not positive; the run is
    # still meaningful (e.g. single-set anchors), it just has no bound.
    bound = cover_bound(r, m, delta, fam.max_size()) if float(Fraction(r)) * delta > 1 else None
    words = _member_words(fam.members)
    n = fam.ground_n

    def block(spec) -> int:
        first, count = spec
        lanes = LaneStreams(seed, first, count)
        w = np.zeros(count, dtype=np.uint64)
        for e in range(n):
            w |= (lanes.random() < p).astype(np.uint64) << np.uint64(e)
        return int(_hits(w, words).sum())

    successes = sum(_run_blocks(block, trials, threads))
    return _outcome(trials, successes, bound, seed, p)


def two_coloring_experiment(g1: SetFamily, g2: SetFamily, excluded: Face,
                            trials: int, seed: int, threads: int = 1) -> TrialOutcome:
    """Split the non-excluded elements uniformly into U1, U2; success when
    some member of ``g1`` lies in U1 and some member of ``g2`` lies in U2.

    ``side_rates`` holds the two one-sided hit rates; the argument that
    uses this experiment needs both above 1/2.
    """
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    for f in list(g1) + list(g2):
        if f & excluded:
            raise InvalidArgument("family members must avoid the excluded set")
    if not g1 or not g2:
        raise InvalidArgument("both families must be non-empty")
    n = max(g1.ground_n, g2.ground_n)
    w1, w2 = _member_words(g1.members), _member_words(g2.members)
    free = [e for e in range(n) if not (excluded >> (e + 1)) & 1]

    def block(spec) -> tuple[int, int, int]:
        first, count = spec
        lanes = LaneStreams(seed, first, count)
        u1 = np.zeros(count, dtype=np.uint64)
        u2 = np.zeros(count, dtype=np.uint64)
        for e in free:
            left = lanes.random() < 0.5
            bit = np.uint64(1) << np.uint64(e)
            u1 |= np.where(left, bit, np.uint64(0))
            u2 |= np.where(left, np.uint64(0), bit)
        h1, h2 = _hits(u1, w1), _hits(u2, w2)
        return int((h1 & h2).sum()), int(h1.sum()), int(h2.sum())

    parts = _run_blocks(block, trials, threads)
    both = sum(x[0] for x in parts)
    side = (sum(x[1] for x in parts) / trials, sum(x[2] for x in parts) / trials)
    return _outcome(trials, both, None, seed, 0.5, side)


# -- exact references for small supports ----------------------------------------

def exact_cover_probability(fam: SetFamily, p: float) -> float:
    """Exact Pr[some member inside a p-random set] by enumerating the support."""
    support = 0
    for f in fam:
        support |= f
    elems = [e for e in range(1, fam.ground_n + 1) if (support >> e) & 1]
    if len(elems) > 22:
        raise InvalidArgument("support too large for exact enumeration")
    total = 0.0
    for mask in range(1 << len(elems)):
        w = 0
        for i, e in enumerate(elems):
            if (mask >> i) & 1:
                w |= 1 << e
        if any(f & w == f for f in fam):
            j = bin(mask).count("1")
            total += p ** j * (1 - p) ** (len(elems) - j)
    return total


def exact_two_coloring_probability(g1: SetFamily, g2: SetFamily, excluded: Face) -> float:
    support = 0
    for f in list(g1) + list(g2):
        support |= f
    n = max(g1.ground_n, g2.ground_n)
    elems = [e for e in range(1, n + 1) if (support >> e) & 1 and not (excluded >> e) & 1]
    if len(elems) > 22:
        raise InvalidArgument("support too large for exact enumeration")
    good = 0
    for mask in range(1 << len(elems)):
        u1 = u2 = 0
        for i, e in enumerate(elems):
            if (mask >> i) & 1:
                u1 |= 1 << e
            else:
                u2 |= 1 << e
        if any(f & u1 == f for f in g1) and any(f & u2 == f for f in g2):
            good += 1
    return good / (1 << len(elems))
