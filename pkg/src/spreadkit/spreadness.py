"""Spreadness of set families and the exact checks built on it.

All threshold comparisons are done in integers: for a rational
``r = a/b`` the condition ``|A(X)| <= r**-|X| * |A|`` is tested as
``|A(X)| * a**|X| <= |A| * b**|X|``. Floating point is only used to report
real-valued spreadness for display.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .complex import Complex, layer, rank, star_size
from .faces import Face, InvalidArgument, SetFamily, section, size, subsets

_DENSE_LIMIT = 20


def superset_counts(fam: SetFamily) -> dict[Face, int]:
    """``{Y: |A(Y)|}`` for every ``Y`` contained in at least one member.

    The empty face maps to ``len(fam)``.
    """
    n = fam.ground_n
    if n <= _DENSE_LIMIT and len(fam) > 64:
        counts = np.zeros(1 << n, dtype=np.int64)
        np.add.at(counts, np.array([f >> 1 for f in fam], dtype=np.int64), 1)
        # Superset-sum (zeta) transform, one axis per element.
        for i in range(n):
            view = counts.reshape(-1, 2, 1 << i)
            view[:, 0, :] += view[:, 1, :]
        nz = np.flatnonzero(counts)
        return {int(y) << 1: int(c) for y, c in zip(nz, counts[nz])}
    out: Counter = Counter()
    for f in fam:
        for y in subsets(f):
            out[y] += 1
    return dict(out)


def _as_fraction(r) -> Fraction:
    r = Fraction(r)
    if r < 1:
        raise InvalidArgument(f"spreadness parameter r={r} must be >= 1")
    return r


@dataclass(frozen=True)
class SpreadReport:
    """Largest ``r`` for which a family is r-spread.

    ``ratio`` is ``|A| / |A(witness)|`` exactly, i.e. ``r_star ** |witness|``.
    A family whose members are all empty is r-spread for every r; then
    ``r_star`` is infinite and there is no witness.
    """

    r_star: float
    witness: Optional[Face]
    ratio: Optional[Fraction]
    rq_table: tuple[float, ...] = ()


def _root(ratio: Fraction, j: int) -> float:
    return float(ratio) ** (1.0 / j)


def _less(r1: Fraction, j1: int, r2: Fraction, j2: int) -> int:
    """Compare r1**(1/j1) with r2**(1/j2) exactly: -1, 0 or 1."""
    left = r1 ** j2
    right = r2 ** j1
    return (left > right) - (left < right)


def spread_value(fam: SetFamily) -> SpreadReport:
    if not fam:
        raise InvalidArgument("spreadness of an empty family is undefined")
    counts = superset_counts(fam)
    return _spread_from_counts(counts, len(fam))


def _spread_from_counts(counts: dict[Face, int], total: int) -> SpreadReport:
    best: Optional[tuple[Fraction, int, Face]] = None
    best_log = math.inf
    for y, c in counts.items():
        if y == 0:
            continue
        j = size(y)
        val = (math.log(total) - math.log(c)) / j
        if val > best_log + 1e-9:
            continue
        ratio = Fraction(total, c)
        if best is None:
            best, best_log = (ratio, j, y), val
            continue
        cmp = _less(ratio, j, best[0], best[1])
        if cmp < 0 or (cmp == 0 and y < best[2]):
            best = (ratio, j, y)
            best_log = min(best_log, val)
    if best is None:
        return SpreadReport(math.inf, None, None)
    ratio, j, y = best
    return SpreadReport(_root(ratio, j), y, ratio)


def spread_profile(fam: SetFamily, q: int) -> SpreadReport:
    """:func:`spread_value` plus, for q' = 0..q, the largest r with (r, q')-spread.

    Exhaustive over pairs (S, Y) with S strictly inside Y; meant for small
    families.
    """
    base = spread_value(fam)
    counts = superset_counts(fam)
    per_size = [math.inf] * (q + 1)
    for s, cs in counts.items():
        ls = size(s)
        if ls > q:
            continue
        for y, cy in counts.items():
            if y != s and y & s == s:
                v = (cs / cy) ** (1.0 / (size(y) - ls))
                if v < per_size[ls]:
                    per_size[ls] = v
    table = []
    running = math.inf
    for v in per_size:
        running = min(running, v)
        table.append(running)
    return SpreadReport(base.r_star, base.witness, base.ratio, tuple(table))


class RQCheck(NamedTuple):
    holds: bool
    witness: Optional[tuple[Face, Face]] = None


def is_rq_spread(fam: SetFamily, r, q: int) -> RQCheck:
    """Is every trace ``A(S)`` with ``|S| <= q`` r-spread?

    First checks one-element extensions ``c(S + x) * a <= c(S) * b`` for all
    S; if they all pass, iterating them proves the full condition. Only when
    a one-step failure sits at ``|S| > q`` is the exhaustive check needed.
    The witness ``(S, X)`` is the smallest violating pair.
    """
    r = _as_fraction(r)
    if q < 0:
        raise InvalidArgument("q must be non-negative")
    if not fam:
        return RQCheck(True)
    a, b = r.numerator, r.denominator
    counts = superset_counts(fam)
    low_fail = []
    high_fail = False
    for z, cz in counts.items():
        bits = z
        while bits:
            low = bits & -bits
            bits ^= low
            s = z ^ low
            if cz * a > counts[s] * b:
                if size(s) <= q:
                    low_fail.append((s, low))
                else:
                    high_fail = True
    if low_fail:
        return RQCheck(False, min(low_fail))
    if not high_fail:
        return RQCheck(True)
    fails = []
    for s, cs in counts.items():
        if size(s) > q:
            continue
        for z, cz in counts.items():
            if z != s and z & s == s:
                j = size(z) - size(s)
                if cz * a ** j > cs * b ** j:
                    fails.append((s, z ^ s))
    if fails:
        return RQCheck(False, min(fails))
    return RQCheck(True)


def is_r_spread(fam: SetFamily, r) -> bool:
    return is_rq_spread(fam, r, 0).holds


# -- checks on complexes ----------------------------------------------------

class LymCheck(NamedTuple):
    holds: bool
    worst_ratio: Fraction
    witness: int
    bound: Fraction


def _check_k(cx: Complex, k: int) -> int:
    n = rank(cx)
    if not 1 <= k <= n:
        raise InvalidArgument(f"need 1 <= k <= rank={n}, got k={k}")
    return n


def local_lym_check(cx: Complex, k: int) -> LymCheck:
    """Largest share of layer ``k`` through a single element, against ``k/rank``."""
    n = _check_k(cx, k)
    lay = layer(cx, k)
    if not lay:
        raise InvalidArgument(f"layer {k} is empty")
    degree: Counter = Counter()
    for f in lay:
        bits = f
        while bits:
            low = bits & -bits
            degree[low.bit_length() - 1] += 1
            bits ^= low
    top = max(degree.values())
    x = min(e for e, c in degree.items() if c == top)
    worst = Fraction(top, len(lay))
    bound = Fraction(k, n)
    return LymCheck(worst <= bound, worst, x, bound)


def lemma_spread_check(cx: Complex, k: int) -> RQCheck:
    """Layer ``k`` of a complex of rank n is (n/k, k)-spread."""
    n = _check_k(cx, k)
    return is_rq_spread(layer(cx, k), Fraction(n, k), k)


class RestrictionCheck(NamedTuple):
    lhs: int
    rhs: Fraction
    holds: bool

    @property
    def rhs_float(self) -> float:
        return float(self.rhs)


def restriction_bound(n: int, k: int, t: int, s: int, star: int) -> Fraction:
    """``(1 - (k-t)/(n-s-t))**s * star``, exactly."""
    return (1 - Fraction(k - t, n - s - t)) ** s * star


def restriction_bound_check(cx: Complex, k: int, t: int, T: Face, F: Face) -> RestrictionCheck:
    """Sets of layer ``k`` through ``T`` that avoid ``F`` versus the product bound."""
    n = _check_k(cx, k)
    s = size(F)
    if size(T) != t or not 1 <= t <= k:
        raise InvalidArgument("T must have exactly t elements, 1 <= t <= k")
    if F & T:
        raise InvalidArgument("F and T must be disjoint")
    if s + k >= n:
        raise InvalidArgument(f"need s + k < rank (s={s}, k={k}, rank={n})")
    lay = layer(cx, k)
    lhs = len(section(lay, T, F | T))
    rhs = restriction_bound(n, k, t, s, star_size(cx, k, T))
    return RestrictionCheck(lhs, rhs, lhs >= rhs)
