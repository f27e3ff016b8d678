"""Simplicial complexes stored by their facets."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

from .faces import (Face, InvalidArgument, SetFamily, full_face, k_subsets,
                    size)


@dataclass(frozen=True)
class Complex:
    """A down-closed family over ``[ground_n]``, kept as its facet antichain.

    Build instances with :func:`from_facets`; the constructor does not
    re-check the antichain property.
    """

    ground_n: int
    facets: SetFamily

    @property
    def rank(self) -> int:
        return rank(self)

    def __contains__(self, f: object) -> bool:
        return isinstance(f, int) and contains(self, f)


def from_facets(candidates: SetFamily) -> Complex:
    """Keep only the inclusion-maximal candidates."""
    if not candidates:
        raise InvalidArgument("a complex needs at least one facet")
    by_size = sorted(candidates, key=lambda f: (-size(f), f))
    kept: list[Face] = []
    for f in by_size:
        if not any(f & g == f for g in kept):
            kept.append(f)
    return Complex(candidates.ground_n, candidates.with_members(kept))


def complete(n: int) -> Complex:
    return from_facets(SetFamily.of(n, [full_face(n)]))


def rank(cx: Complex) -> int:
    """Minimum facet size."""
    return min(size(f) for f in cx.facets)


def dimension_bound(cx: Complex) -> int:
    """Maximum facet size."""
    return max(size(f) for f in cx.facets)


def contains(cx: Complex, f: Face) -> bool:
    return any(f & g == f for g in cx.facets)


def layer(cx: Complex, k: int) -> SetFamily:
    """All ``k``-element faces of the complex."""
    if k < 0:
        raise InvalidArgument("layer index must be non-negative")
    if k == 0:
        return SetFamily(cx.ground_n, (0,))
    found: set[Face] = set()
    for g in cx.facets:
        if size(g) >= k:
            found.update(k_subsets(g, k))
    return SetFamily(cx.ground_n, tuple(sorted(found)))


def star_size(cx: Complex, k: int, T: Face) -> int:
    """Number of ``k``-faces containing ``T``."""
    if size(T) > k:
        raise InvalidArgument("star centre larger than the layer index")
    return sum(1 for f in layer(cx, k) if f & T == T)


class BestStar(NamedTuple):
    T: Face
    size: int


def best_star(cx: Complex, k: int, t: int) -> BestStar:
    """The ``t``-set with the largest star in layer ``k``.

    Ties go to the smallest set as an integer mask; when every star is
    empty the answer is ``{1..t}`` with size 0.
    """
    if t > k:
        raise InvalidArgument("t must not exceed k")
    return best_star_in(layer(cx, k), t)


def best_star_in(fam: SetFamily, t: int) -> BestStar:
    counts: Counter = Counter()
    for f in fam:
        for T in k_subsets(f, t):
            counts[T] += 1
    if not counts:
        return BestStar(full_face(t), 0)
    top = max(counts.values())
    return BestStar(min(T for T, c in counts.items() if c == top), top)
