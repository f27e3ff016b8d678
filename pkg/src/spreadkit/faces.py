"""Faces (subsets of a ground set) and families of faces.

A face is stored as a plain ``int`` bitmask in which bit ``i`` stands for
element ``i``; elements are numbered ``1..N`` so bit 0 is never set.
Integer order on masks is the canonical member order for families, which
makes family equality plain tuple equality.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Optional

MAX_GROUND = 64

Face = int


class InvalidArgument(ValueError):
    """Raised when an operation's preconditions are violated."""


def face(*elements: int) -> Face:
    """Build a face from its elements: ``face(1, 3) == 0b1010``."""
    return face_of(elements)


def face_of(elements: Iterable[int]) -> Face:
    mask = 0
    for x in elements:
        if not 1 <= x <= MAX_GROUND:
            raise InvalidArgument(f"element {x} outside 1..{MAX_GROUND}")
        mask |= 1 << x
    return mask


def elements(f: Face) -> list[int]:
    out = []
    while f:
        low = f & -f
        out.append(low.bit_length() - 1)
        f ^= low
    return out


def size(f: Face) -> int:
    return f.bit_count()


def full_face(n: int) -> Face:
    """The face ``{1, ..., n}``."""
    return ((1 << n) - 1) << 1


def subsets(f: Face) -> Iterator[Face]:
    """All subsets of ``f`` including the empty face and ``f`` itself."""
    sub = f
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & f


def k_subsets(f: Face, k: int) -> Iterator[Face]:
    for combo in combinations(elements(f), k):
        yield face_of(combo)


def format_face(f: Face) -> str:
    return "{" + ",".join(map(str, elements(f))) + "}"


@dataclass(frozen=True)
class SetFamily:
    """A duplicate-free family of faces over the ground set ``[ground_n]``.

    Members are kept sorted ascending as integers. Use :meth:`of` to build a
    family from arbitrary input; the plain constructor trusts its arguments.
    """

    ground_n: int
    members: tuple[Face, ...]

    @classmethod
    def of(cls, ground_n: int, faces: Iterable[Face]) -> "SetFamily":
        if not 0 <= ground_n <= MAX_GROUND:
            raise InvalidArgument(f"ground size {ground_n} outside 0..{MAX_GROUND}")
        limit = full_face(ground_n)
        uniq = set()
        for f in faces:
            if f < 0 or f & ~limit:
                raise InvalidArgument(
                    f"face {f:#x} has elements outside [1..{ground_n}]")
            uniq.add(f)
        return cls(ground_n, tuple(sorted(uniq)))

    @classmethod
    def from_sets(cls, ground_n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls.of(ground_n, (face_of(s) for s in sets))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Face]:
        return iter(self.members)

    def __contains__(self, f: object) -> bool:
        i = bisect_left(self.members, f)
        return i < len(self.members) and self.members[i] == f

    def __bool__(self) -> bool:
        return bool(self.members)

    def as_sets(self) -> list[list[int]]:
        return [elements(f) for f in self.members]

    def max_size(self) -> int:
        return max((size(f) for f in self.members), default=0)

    def is_uniform(self) -> bool:
        return len({size(f) for f in self.members}) <= 1

    def with_members(self, faces: Iterable[Face]) -> "SetFamily":
        """Same ground set, new (already valid) members."""
        return SetFamily(self.ground_n, tuple(sorted(set(faces))))

    def __repr__(self) -> str:
        body = ", ".join(format_face(f) for f in self.members[:8])
        more = ", ..." if len(self.members) > 8 else ""
        return f"SetFamily(N={self.ground_n}, [{body}{more}], size={len(self)})"


def complete_layer(n: int, k: int) -> SetFamily:
    """All ``k``-subsets of ``[n]``."""
    return SetFamily.of(n, k_subsets(full_face(n), k))


# -- derived families -------------------------------------------------------

def trace(fam: SetFamily, b: Face) -> SetFamily:
    """Members containing ``b``, with ``b`` removed."""
    _check_face(fam, b)
    return fam.with_members(f & ~b for f in fam if f & b == b)


def avoid(fam: SetFamily, b: Face) -> SetFamily:
    """Members disjoint from ``b``."""
    _check_face(fam, b)
    return SetFamily(fam.ground_n, tuple(f for f in fam if not f & b))


def superset(fam: SetFamily, b: Face) -> SetFamily:
    """Members containing ``b``, left intact."""
    _check_face(fam, b)
    return SetFamily(fam.ground_n, tuple(f for f in fam if f & b == b))


def superset_union(fam: SetFamily, cover: Iterable[Face]) -> SetFamily:
    """Members containing at least one face of ``cover``."""
    cover = list(cover)
    for b in cover:
        _check_face(fam, b)
    return SetFamily(fam.ground_n,
                     tuple(f for f in fam if any(f & b == b for b in cover)))


def section(fam: SetFamily, x: Face, y: Face) -> SetFamily:
    """Members meeting ``y`` in exactly ``x``, with ``x`` removed."""
    _check_face(fam, x)
    _check_face(fam, y)
    if x & ~y:
        raise InvalidArgument("section needs X to be a subset of Y")
    return fam.with_members(f & ~x for f in fam if f & y == x)


_KINDS = {
    "trace": trace,
    "avoid": avoid,
    "superset": superset,
    "superset_union": superset_union,
    "section": section,
}


def derived_family(fam: SetFamily, kind: str, *args) -> SetFamily:
    """Dispatch to one of the derived-family operations by name."""
    try:
        op = _KINDS[kind]
    except KeyError:
        raise InvalidArgument(f"unknown derived family kind {kind!r}") from None
    return op(fam, *args)


def _check_face(fam: SetFamily, f: Face) -> None:
    if f < 0 or f & ~full_face(fam.ground_n):
        raise InvalidArgument(f"face {format_face(f)} not within [1..{fam.ground_n}]")


# -- intersection properties ------------------------------------------------

class IntersectionCheck(NamedTuple):
    holds: bool
    witness: Optional[tuple[Face, Face]] = None


def is_t_intersecting(fam: Iterable[Face], t: int) -> IntersectionCheck:
    """Check that every two (not necessarily distinct) members share ``t`` elements.

    A member smaller than ``t`` fails against itself, so ``{F}`` with
    ``|F| < t`` is not t-intersecting. The witness is the first violating
    pair in canonical order.
    """
    if t < 1:
        raise InvalidArgument("t must be >= 1")
    members = sorted(set(fam))
    for i, a in enumerate(members):
        if a.bit_count() < t:
            return IntersectionCheck(False, (a, a))
        for b in members[i + 1:]:
            if (a & b).bit_count() < t:
                return IntersectionCheck(False, (a, b))
    return IntersectionCheck(True)


def common_core(fam: Iterable[Face]) -> Face:
    """Intersection of all members."""
    members = list(fam)
    if not members:
        raise InvalidArgument("common core of an empty family is undefined")
    core = members[0]
    for f in members[1:]:
        core &= f
    return core


def is_trivial(fam: Iterable[Face], t: int) -> bool:
    """True when the members share a common core of at least ``t`` elements."""
    return common_core(fam).bit_count() >= t
