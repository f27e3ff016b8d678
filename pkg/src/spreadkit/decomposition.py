"""Spread approximation: peel a family into dense traces plus a remainder.

Starting from ``F^1 = F``, each round picks an inclusion-maximal set ``S``
with ``|F^i(S)| >= r**-|S| * |F^i|``, and either stops (``|S| > q`` or
nothing left) or removes ``F^i[S]`` and continues. Maximality makes every
peeled trace ``F^i(S_i)`` r-spread, which :func:`verify_decomposition`
re-checks exactly.

The maximal dense set found on a remainder with ``q`` unbounded (the first
``S`` of ``spread_approximation(rest, ambient, r, q=len(ground))``) is the
set the stability argument works with; it needs no separate entry point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

from .checks import Verification
from .complex import best_star_in
from .faces import (Face, InvalidArgument, SetFamily, common_core, elements,
                    is_t_intersecting, size, superset_union, trace)
from .spreadness import is_r_spread, is_rq_spread, superset_counts

EXHAUSTED = "exhausted"
OVERSIZE = "oversize_set"


class Step(NamedTuple):
    family_size: int
    chosen: Face
    trace_size: int

    @property
    def density(self) -> float:
        return self.trace_size / self.family_size


@dataclass(frozen=True)
class Decomposition:
    cover: tuple[Face, ...]
    pieces: tuple[SetFamily, ...]
    remainder: SetFamily
    stop_reason: str
    last_set: Optional[Face]
    trace: tuple[Step, ...]
    r: Fraction
    q: int


def _dense(count: int, total: int, j: int, a: int, b: int) -> bool:
    # count >= r**-j * total with r = a/b
    return count * a ** j >= total * b ** j


def maximal_dense_set(fam: SetFamily, r, mode: str = "greedy") -> Face:
    """An inclusion-maximal ``S`` with ``|fam(S)| >= r**-|S| |fam|``.

    ``greedy`` grows from the empty set, each time adding the element whose
    extension keeps the condition and leaves the largest trace (smallest
    element on ties). A single-element extension can fail while a larger
    one passes, so when growth stalls the qualifying strict supersets are
    searched and the largest (then densest, then smallest mask) is taken.
    ``exhaustive`` takes that same canonical choice over all qualifying sets.
    """
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    total = len(fam)
    if total == 0:
        raise InvalidArgument("dense sets of an empty family are undefined")
    counts = superset_counts(fam)
    ground = 0
    for f in fam:
        ground |= f

    def best_superset(s: Face) -> Optional[Face]:
        best = None
        for y, c in counts.items():
            if y != s and y & s == s and _dense(c, total, size(y), a, b):
                key = (size(y), c, -y)
                if best is None or key > best[0]:
                    best = (key, y)
        return None if best is None else best[1]

    if mode == "exhaustive":
        top = best_superset(0)
        return 0 if top is None else top
    if mode != "greedy":
        raise InvalidArgument(f"unknown mode {mode!r}")
    s = 0
    while True:
        j = size(s) + 1
        pick, pick_count = None, -1
        free = ground & ~s
        while free:
            low = free & -free
            free ^= low
            c = counts.get(s | low, 0)
            if c > pick_count and _dense(c, total, j, a, b):
                pick, pick_count = low, c
        if pick is not None:
            s |= pick
            continue
        jump = best_superset(s)
        if jump is None:
            return s
        s = jump


def spread_approximation(F: SetFamily, ambient: SetFamily, r, q: int,
                         mode: str = "greedy") -> Decomposition:
    r = Fraction(r)
    if r < 1:
        raise InvalidArgument("r must be >= 1")
    if q < 0:
        raise InvalidArgument("q must be >= 0")
    if F.ground_n != ambient.ground_n:
        raise InvalidArgument("F and the ambient family live on different ground sets")
    missing = [f for f in F if f not in ambient]
    if missing:
        raise InvalidArgument(f"{len(missing)} member(s) of F are not in the ambient family")
    current = F
    cover, pieces, steps = [], [], []
    while True:
        if not current:
            return Decomposition(tuple(cover), tuple(pieces), current, EXHAUSTED,
                                 None, tuple(steps), r, q)
        s = maximal_dense_set(current, r, mode)
        inside = [f for f in current if f & s == s]
        steps.append(Step(len(current), s, len(inside)))
        if size(s) > q:
            return Decomposition(tuple(cover), tuple(pieces), current, OVERSIZE,
                                 s, tuple(steps), r, q)
        cover.append(s)
        pieces.append(current.with_members(inside))
        current = current.with_members(f for f in current if f & s != s)


def verify_decomposition(d: Decomposition, F: SetFamily, ambient: SetFamily, t: int,
                         r0=None, star: Optional[int] = None) -> Verification:
    """Re-check the procedure's guarantees on a finished decomposition.

    Partition, containment, cover sizes and the r-spreadness of each peeled
    trace are binding. Whether the cover is t-intersecting is reported
    only: that conclusion needs r far beyond desk-scale values. With ``r0``
    and ``star`` the remainder bound is evaluated; it is binding only when
    ``q >= t`` and the ambient family is (r0, t)-spread.
    """
    if d.remainder.ground_n != F.ground_n:
        raise InvalidArgument("decomposition does not belong to this family")
    v = Verification()
    r, q = d.r, d.q
    pieces = [f for piece in d.pieces for f in piece] + list(d.remainder)
    v.add("partition", sorted(pieces) == list(F.members),
          pieces=len(pieces), family=len(F))
    bad = [(i, f) for i, (s, piece) in enumerate(zip(d.cover, d.pieces))
           for f in piece if f & s != s]
    v.add("containment", not bad, failures=len(bad))
    v.add("cover_size", all(size(s) <= q for s in d.cover),
          max_cover=max((size(s) for s in d.cover), default=0), q=q)
    not_spread = [i for i, (s, piece) in enumerate(zip(d.cover, d.pieces))
                  if not piece or not is_r_spread(trace(piece, s), r)]
    v.add("piece_spread", not not_spread, failing_pieces=not_spread)
    progress = all(st.trace_size >= 1 for st in d.trace)
    v.add("progress", progress)
    if d.stop_reason == OVERSIZE:
        last = d.last_set
        rem = d.remainder
        dense = (last is not None and bool(rem) and _dense(
            sum(1 for f in rem if f & last == last), len(rem), size(last),
            r.numerator, r.denominator))
        v.add("stop_condition", last is not None and size(last) >= q + 1 and dense)
    else:
        v.add("stop_condition", not d.remainder and d.last_set is None)
    inter = is_t_intersecting(d.cover, t)
    v.add("cover_t_intersecting", inter.holds, binding=False,
          witness=[elements(f) for f in inter.witness] if inter.witness else None)
    if r0 is not None and star is not None:
        r0 = Fraction(r0)
        bound = remainder_bound(r, r0, q, t, star)
        ambient_ok = is_rq_spread(ambient, r0, t).holds
        v.add("remainder_bound", len(d.remainder) <= bound, binding=ambient_ok and q >= t,
              remainder=len(d.remainder), bound=bound, ambient_rq_spread=ambient_ok)
    return v


# -- parameter arithmetic -----------------------------------------------------

def _exact_log2(x: Fraction) -> Optional[int]:
    """log2(x) when x is a power of two, else None."""
    num, den = x.numerator, x.denominator
    if num & (num - 1) == 0 and den & (den - 1) == 0:
        return num.bit_length() - den.bit_length()
    return None


def _log2(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


@dataclass(frozen=True)
class ParameterPlan:
    n: int
    k: int
    t: int
    r0: Fraction
    r: Fraction
    q: int
    q_real: float
    hyp_n_vs_klogk: bool
    hyp_n_vs_tklog2: bool
    cond_r_ge_2q: bool
    cond_r_gt_spreadgate: bool
    cond_q_ge_t: bool
    remainder_exponent: float
    remainder_log2_factor: float
    stability_exponent: float
    exact_logs: bool

    @property
    def hypotheses_met(self) -> bool:
        return self.hyp_n_vs_klogk and self.hyp_n_vs_tklog2


def parameter_plan(n: int, k: int, t: int) -> ParameterPlan:
    """Evaluate the hypotheses and parameters of the large-n star bound.

    ``q = floor(2**-18 n / (k log2(n/k)))``, ``r0 = n/k``, ``r = r0/2``.
    Comparisons are exact integer arithmetic whenever the logarithms
    involved are integers (powers of two); otherwise they fall back to
    double precision, where an exact tie is impossible.
    """
    if not (n > k >= t >= 1):
        raise InvalidArgument("need n > k >= t >= 1")
    r0 = Fraction(n, k)
    r = r0 / 2
    lg_r0 = _exact_log2(r0)
    lg_2k = _exact_log2(Fraction(2 * k))
    x_real = n / (k * _log2(r0))
    if lg_r0 is not None:
        q = n // (2 ** 18 * k * lg_r0)
        hyp2 = n >= 2 ** 19 * t * k * lg_r0 ** 2
    else:
        q = math.floor(2.0 ** -18 * x_real)
        hyp2 = n >= 2 ** 19 * t * k * _log2(r0) ** 2
    if lg_2k is not None:
        hyp1 = n >= 2 ** 13 * k * lg_2k
        gate = r > 2 ** 12 * lg_2k
    else:
        hyp1 = n >= 2 ** 13 * k * math.log2(2 * k)
        gate = float(r) > 2 ** 12 * math.log2(2 * k)
    return ParameterPlan(
        n=n, k=k, t=t, r0=r0, r=r, q=q, q_real=2.0 ** -18 * x_real,
        hyp_n_vs_klogk=hyp1, hyp_n_vs_tklog2=hyp2,
        cond_r_ge_2q=r >= 2 * q, cond_r_gt_spreadgate=gate, cond_q_ge_t=q >= t,
        remainder_exponent=2.0 ** -19 * x_real,
        remainder_log2_factor=-(q + 1) + t * _log2(r0),
        stability_exponent=stability_exponent(n, k),
        exact_logs=lg_r0 is not None and lg_2k is not None)


def remainder_bound(r, r0, q: int, t: int, star: int) -> Fraction:
    """``r**(q+1) * r0**(t-q-1) * star`` as an exact fraction."""
    r, r0 = Fraction(r), Fraction(r0)
    if r > r0:
        raise InvalidArgument("remainder bound needs r <= r0")
    if star < 0:
        raise InvalidArgument("star size must be non-negative")
    return r ** (q + 1) * r0 ** (t - q - 1) * star


def stability_exponent(n: int, k: int) -> float:
    """``2**-20 * n / (k log2(n/k))``."""
    if n <= k:
        raise InvalidArgument("need n > k")
    return 2.0 ** -20 * n / (k * _log2(Fraction(n, k)))


def stability_bound_at(star: int, m: int, exponent: float) -> float:
    """``max(star - m * 2**exponent, 0.6 * star)``."""
    if star < 0 or m < 0:
        raise InvalidArgument("star and m must be non-negative")
    floor_value = 0.6 * star
    if m == 0:
        return float(star)
    # Avoid overflowing 2**exponent: once m * 2**e exceeds 0.4 * star the
    # second branch wins anyway.
    if star == 0 or math.log2(m) + exponent >= math.log2(0.4 * star):
        return floor_value
    return max(star - m * 2.0 ** exponent, floor_value)


def stability_bound(star: int, m: int, n: int, k: int) -> float:
    return stability_bound_at(star, m, stability_exponent(n, k))


def stability_deficit(F: SetFamily, t: int) -> tuple[int, Face]:
    """``min_T |F \\ F[T]|`` over t-sets T, with a minimising T.

    This is the quantity the stability argument actually bounds (the part
    of F outside the best star); see the README for why the literal
    ``|F(T) \\ C(T)|`` form is not used.
    """
    T, inside = best_star_in(F, t)
    return len(F) - inside, T


class CoverCheck(NamedTuple):
    lhs: int
    rhs: Fraction
    holds: bool
    T: Face


def nontrivial_cover_check(ambient: SetFamily, cover: Iterable[Face], t: int,
                           eps=Fraction(1, 2)) -> CoverCheck:
    """``|A[S]|`` for a non-trivial t-intersecting cover versus ``eps * max_T |A[T]|``.

    An empirical comparison: ``holds=False`` is an outcome, not an error,
    since the guarantee needs ``eps * r0 >= 2**17 q log2 q``.
    """
    cover = sorted(set(cover))
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise InvalidArgument("eps must lie in (0, 1]")
    if not cover:
        raise InvalidArgument("cover must be non-empty")
    if not is_t_intersecting(cover, t).holds:
        raise InvalidArgument("cover is not t-intersecting")
    if size(common_core(cover)) >= t:
        raise InvalidArgument("cover is trivial (common core has >= t elements)")
    lhs = len(superset_union(ambient, cover))
    T, top = best_star_in(ambient, t)
    rhs = eps * top
    return CoverCheck(lhs, rhs, lhs <= rhs, T)
