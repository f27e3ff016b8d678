"""Reading complexes and graphs from text, and generating instances.

Facet files hold one facet per line as whitespace-separated positive
integers; an optional ``n <N>`` header widens the ground set beyond the
largest element. Graph files hold ``u v`` edge lines (an ``e`` prefix is
accepted) and an optional DIMACS-like ``p <n> <m>`` header. ``#`` starts a
comment in both formats.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .complex import Complex, from_facets
from .faces import MAX_GROUND, Face, InvalidArgument, SetFamily, elements, face_of, full_face
from .rng import Xoshiro256


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if not 0 <= n_vertices <= MAX_GROUND:
            raise InvalidArgument(f"vertex count {n_vertices} outside 0..{MAX_GROUND}")
        seen = set()
        for u, v in edges:
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {u}")
            if not (1 <= u <= n_vertices and 1 <= v <= n_vertices):
                raise InvalidArgument(f"edge ({u}, {v}) outside 1..{n_vertices}")
            seen.add((min(u, v), max(u, v)))
        return cls(n_vertices, tuple(sorted(seen)))

    def neighbourhoods(self) -> list[Face]:
        nbr = [0] * (self.n_vertices + 1)
        for u, v in self.edges:
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        return nbr


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", lineno) from None


def parse_facets(text: str) -> Complex:
    ground = None
    facets: list[Face] = []
    top = 0
    for lineno, toks in _lines(text):
        if toks[0] == "n":
            if len(toks) != 2 or ground is not None:
                raise ParseError("header must be a single 'n <N>' line", lineno)
            ground = _int(toks[1], lineno)
            if not 0 <= ground <= MAX_GROUND:
                raise ParseError(f"ground size {ground} outside 0..{MAX_GROUND}", lineno)
            continue
        elems = [_int(tok, lineno) for tok in toks]
        for x in elems:
            if not 1 <= x <= MAX_GROUND:
                raise ParseError(f"element {x} outside 1..{MAX_GROUND}", lineno)
        top = max(top, max(elems))
        facets.append(face_of(elems))
    if not facets:
        raise ParseError("no facets found")
    if ground is None:
        ground = top
    elif ground < top:
        raise ParseError(f"header n={ground} smaller than element {top}")
    return from_facets(SetFamily.of(ground, facets))


def format_facets(cx: Complex) -> str:
    """Canonical facet-file text; parsing it gives back ``cx``."""
    out = [f"n {cx.ground_n}"]
    out.extend(" ".join(map(str, elements(f))) for f in cx.facets)
    return "\n".join(out) + "\n"


def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    for lineno, toks in _lines(text):
        if toks[0] == "p":
            nums = [t for t in toks[1:] if t != "edge"]
            if n is not None or len(nums) not in (1, 2):
                raise ParseError("header must be 'p <n> <m>'", lineno)
            n = _int(nums[0], lineno)
            continue
        if toks[0] == "e":
            toks = toks[1:]
        if len(toks) != 2:
            raise ParseError("edge lines need exactly two vertices", lineno)
        u, v = (_int(tok, lineno) for tok in toks)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        if min(u, v) < 1 or max(u, v) > MAX_GROUND:
            raise ParseError(f"vertex outside 1..{MAX_GROUND}", lineno)
        edges.append((u, v))
    top = max((max(e) for e in edges), default=0)
    if n is None:
        n = top
    elif n < top:
        raise ParseError(f"header declares {n} vertices but edge uses {top}")
    return Graph.of(n, edges)


def format_graph(g: Graph) -> str:
    out = [f"p {g.n_vertices} {len(g.edges)}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def maximal_independent_sets(g: Graph) -> list[Face]:
    """Maximal independent sets via Bron-Kerbosch with pivoting on the complement."""
    everyone = full_face(g.n_vertices)
    nbr = g.neighbourhoods()
    # Complement adjacency: non-neighbours except the vertex itself.
    comp = [0] + [everyone & ~nbr[v] & ~(1 << v) for v in range(1, g.n_vertices + 1)]
    found: list[Face] = []

    def expand(r: Face, p: Face, x: Face) -> None:
        if not p and not x:
            found.append(r)
            return
        px = p | x
        pivot, best = 0, -1
        bits = px
        while bits:
            low = bits & -bits
            u = low.bit_length() - 1
            c = (p & comp[u]).bit_count()
            if c > best:
                pivot, best = u, c
            bits ^= low
        cand = p & ~comp[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            expand(r | low, p & comp[v], x & comp[v])
            p &= ~low
            x |= low
            cand ^= low

    expand(0, everyone, 0)
    return sorted(found)


def independence_complex(g: Graph) -> Complex:
    return from_facets(SetFamily.of(g.n_vertices, maximal_independent_sets(g)))


def gen_complete(n: int) -> Complex:
    if not 1 <= n <= MAX_GROUND:
        raise InvalidArgument(f"n={n} outside 1..{MAX_GROUND}")
    return from_facets(SetFamily.of(n, [full_face(n)]))


def gen_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p): pairs (u, v), u < v, in lexicographic order; edge iff draw < p."""
    if not 1 <= n <= MAX_GROUND:
        raise InvalidArgument(f"n={n} outside 1..{MAX_GROUND}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p={p} outside [0, 1]")
    rng = Xoshiro256(seed)
    edges = [(u, v) for u, v in combinations(range(1, n + 1), 2) if rng.random() < p]
    return Graph.of(n, edges)


def gen_random(kind: str, seed: int, **params) -> Complex:
    """Seeded instance generator.

    ``gnp_graph``: ``n``, ``p`` -- independence complex of G(n, p).
    ``random_facets``: ``n``, ``count``, ``min_size``, ``max_size`` -- each
    facet draws its size uniformly from the range, then a uniform subset.
    """
    if kind == "gnp_graph":
        return independence_complex(gen_graph(params["n"], params["p"], seed))
    if kind == "random_facets":
        n, count = params["n"], params["count"]
        lo, hi = params["min_size"], params["max_size"]
        if not 1 <= n <= MAX_GROUND:
            raise InvalidArgument(f"n={n} outside 1..{MAX_GROUND}")
        if count < 1 or not 1 <= lo <= hi <= n:
            raise InvalidArgument("need count >= 1 and 1 <= min_size <= max_size <= n")
        rng = Xoshiro256(seed)
        pool = list(range(1, n + 1))
        facets = []
        for _ in range(count):
            s = lo + rng.randbelow(hi - lo + 1)
            facets.append(face_of(rng.sample(pool, s)))
        return from_facets(SetFamily.of(n, facets))
    raise InvalidArgument(f"unknown generator kind {kind!r}")


def parse_family(text: str, ground_n: int | None = None) -> SetFamily:
    """A plain family in facet-file syntax; unlike :func:`parse_facets`,
    members contained in other members are kept."""
    header = None
    members = []
    top = 0
    for lineno, toks in _lines(text):
        if toks[0] == "n":
            header = _int(toks[1], lineno) if len(toks) == 2 else None
            if header is None:
                raise ParseError("header must be 'n <N>'", lineno)
            continue
        elems = [_int(tok, lineno) for tok in toks]
        if any(not 1 <= x <= MAX_GROUND for x in elems):
            raise ParseError(f"element outside 1..{MAX_GROUND}", lineno)
        top = max(top, max(elems))
        members.append(face_of(elems))
    n = ground_n if ground_n is not None else (header if header is not None else top)
    if n < top:
        raise ParseError(f"ground size {n} smaller than element {top}")
    return SetFamily.of(n, members)


def load_complex(path, as_graph: bool | None = None) -> Complex:
    """Read a ``.facets`` or ``.graph`` file (``as_graph`` overrides the suffix)."""
    from pathlib import Path

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if as_graph is None:
        as_graph = path.suffix == ".graph"
    return independence_complex(parse_graph(text)) if as_graph else parse_facets(text)
