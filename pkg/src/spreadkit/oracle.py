"""Exact extremal search for t-intersecting subfamilies.

A t-intersecting subfamily of a family is a clique in the compatibility
graph (members joined when they share at least ``t`` elements), i.e. an
independent set of the conflict graph. Maximum cliques are found with a
bitset branch-and-bound in the style of MCQ/BBMC:

* greedy colouring of the candidate set (with re-numbering) is the cheap
  upper bound;
* a spectral bound, ``alpha <= lambda_max(A)`` for any symmetric ``A`` that
  equals 1 on the diagonal and on compatible pairs, is tried on large
  candidate sets where colouring is weak; the free entries (conflicting
  pairs, grouped by intersection size) are tuned numerically and the final
  eigenvalue is recomputed with a dense solver before it is trusted;
* ground elements whose transposition preserves the family ("twins")
  generate a symmetry group, and orbital branching discards members that
  are images of already-explored branches.

Every bound is an upper bound on the true optimum, so the result is exact;
when the node budget runs out :class:`BudgetExceeded` is raised instead of
returning a possibly suboptimal answer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import floor
from typing import Optional

import numpy as np
from scipy import linalg, optimize
from scipy.sparse import linalg as sparse_linalg

from .complex import Complex, best_star_in, layer, rank
from .faces import (Face, InvalidArgument, SetFamily, common_core, elements,
                    size)

DEFAULT_BUDGET = 2_000_000
SPECTRAL_MIN = 24
_EIG_TOL = 1e-7


class BudgetExceeded(RuntimeError):
    """The node budget ran out before optimality was proven."""

    def __init__(self, budget: int, best: int):
        super().__init__(f"search budget of {budget} nodes exhausted "
                         f"(best found so far: {best})")
        self.budget = budget
        self.best = best


@dataclass(frozen=True)
class SearchResult:
    size: int
    witness: SetFamily
    nodes: int


@dataclass
class SearchStats:
    nodes: int = 0
    spectral_calls: int = 0
    spectral_prunes: int = 0
    orbit_removals: int = 0
    extra: dict = field(default_factory=dict)


def twin_classes(faces: list[Face], ground: Face) -> list[Face]:
    """Partition ``ground`` into classes of elements that can be freely permuted.

    Elements x, y are twins when swapping them maps the family onto itself.
    Twinship is an equivalence relation, so testing each element against
    one representative per class suffices.
    """
    present = set(faces)

    def swaps_ok(x: int, y: int) -> bool:
        bx, by = 1 << x, 1 << y
        for f in faces:
            hx, hy = f & bx, f & by
            if bool(hx) != bool(hy):
                g = f ^ bx ^ by
                if g not in present:
                    return False
        return True

    classes: list[list[int]] = []
    for x in elements(ground):
        for cls in classes:
            if swaps_ok(cls[0], x):
                cls.append(x)
                break
        else:
            classes.append([x])
    return [sum(1 << x for x in cls) for cls in classes]


def _refine(cells: list[Face], f: Face) -> list[Face]:
    out = []
    for c in cells:
        a, b = c & f, c & ~f
        if a:
            out.append(a)
        if b:
            out.append(b)
    return out


class _CliqueSearch:
    """Maximum clique over the compatibility graph of ``faces``.

    With ``forbid_core`` the clique's common intersection must have fewer
    than ``t`` elements (non-trivial families).
    """

    def __init__(self, faces: list[Face], t: int, budget: int,
                 forbid_core: bool = False, symmetry: bool = True,
                 spectral: bool = True):
        self.t = t
        self.budget = budget
        self.forbid_core = forbid_core
        self.use_spectral = spectral
        m = len(faces)
        ground = 0
        for f in faces:
            ground |= f
        incidence = np.zeros((m, max(ground.bit_length(), 1)), dtype=np.int32)
        for i, f in enumerate(faces):
            incidence[i, elements(f)] = 1
        inter = incidence @ incidence.T
        compat = inter >= t
        np.fill_diagonal(compat, False)
        degree = compat.sum(axis=1)
        # High compatibility degree first gives tighter greedy colourings;
        # canonical index breaks ties.
        order = sorted(range(m), key=lambda i: (-int(degree[i]), i))
        self.order = order
        self.faces = [faces[v] for v in order]
        perm = np.array(order, dtype=np.intp) if m else np.zeros(0, dtype=np.intp)
        self.inter = inter[np.ix_(perm, perm)] if m else inter
        compat = compat[np.ix_(perm, perm)] if m else compat
        packed = np.packbits(compat, axis=1, bitorder="little") if m else compat
        self.adj = [int.from_bytes(packed[p].tobytes(), "little") for p in range(m)]
        self.n = m
        self.stats = SearchStats()
        self.best = 0
        self.best_clique: list[int] = []
        self.cells = twin_classes(self.faces, ground) if symmetry else None
        self._symmetric = bool(self.cells) and any(
            c & (c - 1) for c in self.cells)
        self._warm: Optional[np.ndarray] = None

    # -- driver -----------------------------------------------------------

    def run(self, lower: int = 0, seed_clique: Optional[list[int]] = None) -> None:
        if seed_clique is not None:
            self.best = lower
            self.best_clique = sorted(seed_clique)
        cells = self.cells if self._symmetric else None
        self._expand([], (1 << self.n) - 1, -1, cells)

    def witness_faces(self) -> list[Face]:
        return sorted(self.faces[v] for v in self.best_clique)

    # -- bounds -----------------------------------------------------------

    def _colour(self, p: int, kmin: int) -> list[tuple[int, int]]:
        """Greedy colouring of ``p``; returns (vertex, colour) for colours >= kmin.

        The list is in non-decreasing colour order, so a vertex's colour
        bounds the clique number of itself plus everything before it.
        """
        adj = self.adj
        classes: list[int] = []
        u = p
        while u:
            q = u
            cls = 0
            while q:
                low = q & -q
                q &= ~(adj[low.bit_length() - 1] | low)
                cls |= low
            u &= ~cls
            if len(classes) + 1 >= kmin > 1:
                cls = self._renumber(cls, classes, kmin)
            classes.append(cls)
        out = []
        k = 0
        for cls in classes:
            if not cls:
                continue
            k += 1
            if k < kmin:
                continue
            bits = cls
            while bits:
                low = bits & -bits
                out.append((low.bit_length() - 1, k))
                bits ^= low
        return out

    def _renumber(self, cls: int, classes: list[int], kmin: int) -> int:
        """Push vertices of ``cls`` into classes below ``kmin`` where possible."""
        adj = self.adj
        limit = min(kmin - 1, len(classes))
        bits = cls
        while bits:
            low = bits & -bits
            bits ^= low
            v = low.bit_length() - 1
            for k1 in range(limit):
                conflict = classes[k1] & adj[v]
                if conflict == 0:
                    classes[k1] |= low
                    cls &= ~low
                    break
                if conflict & (conflict - 1):
                    continue
                w = conflict.bit_length() - 1
                for k2 in range(k1 + 1, limit):
                    if classes[k2] & adj[w] == 0:
                        classes[k1] = (classes[k1] & ~conflict) | low
                        classes[k2] |= conflict
                        cls &= ~low
                        break
                else:
                    continue
                break
        return cls

    def _spectral_bound(self, p: int, target: float = -np.inf) -> float:
        """Certified upper bound on the clique number of the vertex set ``p``.

        For any weights ``w_j`` on pairs meeting in ``j < t`` elements, the
        matrix with ones elsewhere has top eigenvalue at least the clique
        number (test it on the clique's indicator vector). The weights are
        tuned by Nelder-Mead on Lanczos estimates, stopping early once the
        estimate is clearly below ``target``; the returned value comes from
        a dense solver and is padded.
        """
        self.stats.spectral_calls += 1
        idx = _bits(p)
        sub = self.inter[np.ix_(idx, idx)]
        m = len(idx)
        base = (sub >= self.t).astype(float)
        np.fill_diagonal(base, 1.0)
        mats = []
        for j in range(self.t):
            mk = (sub == j).astype(float)
            np.fill_diagonal(mk, 0.0)
            mats.append(mk)
        conflicts = sum(float(mk.sum()) for mk in mats)
        if conflicts == 0:
            return float(m)
        w0 = -m / (conflicts / m + 1.0)
        start = self._warm if self._warm is not None else np.full(self.t, w0)
        v0 = np.ones(m)
        best = [np.inf, start]

        def build(w) -> np.ndarray:
            a = base.copy()
            for wj, mk in zip(w, mats):
                a += wj * mk
            return a

        def lam(w) -> float:
            val = _top_eigenvalue(build(w), v0)
            if val < best[0]:
                best[0], best[1] = val, np.array(w, dtype=float)
            if val < target - 0.05:
                raise _Enough
            return val

        try:
            optimize.minimize(lam, start, method="Nelder-Mead",
                              options={"xatol": 1e-3, "fatol": 1e-4,
                                       "maxfev": 120 * self.t})
        except _Enough:
            pass
        self._warm = best[1]
        top = _certified_top(build(best[1]))
        return top * (1 + _EIG_TOL) + _EIG_TOL

    # -- search -----------------------------------------------------------

    def _orbits(self, p: int, cells: Optional[list[Face]]) -> Optional[dict[int, int]]:
        """Map vertex -> bitmask of its orbit within ``p`` (None: no symmetry)."""
        if cells is None:
            return None
        moving = [c for c in cells if c & (c - 1)]
        if not moving:
            return None
        groups: dict[tuple, int] = {}
        key_of = {}
        faces = self.faces
        bits = p
        while bits:
            low = bits & -bits
            v = low.bit_length() - 1
            bits ^= low
            f = faces[v]
            key = tuple((f & c).bit_count() for c in cells)
            key_of[v] = key
            groups[key] = groups.get(key, 0) | low
        return {v: groups[key] for v, key in key_of.items()}

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.stats.nodes > self.budget:
            raise BudgetExceeded(self.budget, self.best)

    def _expand(self, clique: list[int], p: int, core: int,
                cells: Optional[list[Face]]) -> None:
        self._tick()
        if self.forbid_core and (core == -1 or core.bit_count() >= self.t):
            self._branch_breakers(clique, p, core, cells)
            return
        if len(clique) > self.best:
            self.best = len(clique)
            self.best_clique = list(clique)
        if not p:
            return
        kmin = self.best - len(clique) + 1
        coloured = self._colour(p, kmin)
        if not coloured:
            return
        if (self.use_spectral and p.bit_count() >= SPECTRAL_MIN
                and len(clique) + coloured[-1][1] > self.best + 1):
            if len(clique) + floor(self._spectral_bound(p, kmin)) <= self.best:
                self.stats.spectral_prunes += 1
                return
        orbits = self._orbits(p, cells)
        adj, faces = self.adj, self.faces
        for v, colour in reversed(coloured):
            if not (p >> v) & 1:
                continue
            if len(clique) + colour <= self.best:
                return
            f = faces[v]
            clique.append(v)
            self._expand(clique, p & adj[v], f if core == -1 else core & f,
                         _refine(cells, f) if cells is not None else None)
            clique.pop()
            if orbits is not None:
                self.stats.orbit_removals += 1
                p &= ~orbits[v]
            else:
                p &= ~(1 << v)

    def _branch_breakers(self, clique: list[int], p: int, core: int,
                         cells: Optional[list[Face]]) -> None:
        """Some member of the final family must not contain the current core."""
        faces, adj = self.faces, self.adj
        breakers = 0
        bits = p
        while bits:
            low = bits & -bits
            bits ^= low
            v = low.bit_length() - 1
            if core == -1 or faces[v] & core != core:
                breakers |= low
        orbits = self._orbits(p, cells)
        while breakers:
            coloured = self._colour(p, 0)
            top = coloured[-1][1] if coloured else 0
            if len(clique) + top <= self.best:
                return
            if (self.use_spectral and p.bit_count() >= SPECTRAL_MIN
                    and len(clique) + top > self.best + 1
                    and len(clique) + floor(self._spectral_bound(p, self.best + 1 - len(clique)))
                    <= self.best):
                self.stats.spectral_prunes += 1
                return
            low = breakers & -breakers
            v = low.bit_length() - 1
            f = faces[v]
            clique.append(v)
            self._expand(clique, p & adj[v], f if core == -1 else core & f,
                         _refine(cells, f) if cells is not None else None)
            clique.pop()
            gone = orbits[v] if orbits is not None else low
            p &= ~gone
            breakers &= ~gone


class _Enough(Exception):
    """The spectral estimate already prunes; stop tuning."""


def _top_eigenvalue(a: np.ndarray, v0: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix (an estimate for large ones)."""
    if a.shape[0] > 160:
        try:
            return float(sparse_linalg.eigsh(a, k=1, which="LA", v0=v0, tol=1e-8,
                                             return_eigenvectors=False)[0])
        except sparse_linalg.ArpackNoConvergence:
            pass
    return _certified_top(a)


def _certified_top(a: np.ndarray) -> float:
    m = a.shape[0]
    try:
        return float(linalg.eigvalsh(a, subset_by_index=[m - 1, m - 1])[0])
    except linalg.LinAlgError:
        return float(np.linalg.eigvalsh(a)[-1])


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _check_layer(layer_fam: SetFamily, t: int) -> None:
    if t < 1:
        raise InvalidArgument("t must be >= 1")
    if not layer_fam.is_uniform():
        raise InvalidArgument("extremal search needs a uniform family")
    if layer_fam and size(layer_fam.members[0]) < t:
        raise InvalidArgument("t exceeds the member size")


def max_t_intersecting(layer_fam: SetFamily, t: int,
                       budget: int = DEFAULT_BUDGET, *,
                       symmetry: bool = True, spectral: bool = True) -> SearchResult:
    """Maximum t-intersecting subfamily of a uniform family, exactly.

    The best t-star seeds the incumbent, so when a star is optimal the
    witness is that star (smallest core on ties); otherwise it is the first
    larger family met by the deterministic search.
    """
    _check_layer(layer_fam, t)
    faces = list(layer_fam.members)
    if not faces:
        return SearchResult(0, layer_fam.with_members([]), 0)
    core, star = best_star_in(layer_fam, t)
    search = _CliqueSearch(faces, t, budget, symmetry=symmetry, spectral=spectral)
    seed = [i for i, f in enumerate(search.faces) if f & core == core]
    search.run(star, seed)
    return SearchResult(search.best, layer_fam.with_members(search.witness_faces()),
                        search.stats.nodes)


def max_nontrivial_t_intersecting(layer_fam: SetFamily, t: int,
                                  budget: int = DEFAULT_BUDGET, *,
                                  symmetry: bool = True,
                                  spectral: bool = True) -> SearchResult:
    """Maximum t-intersecting subfamily whose common core has < t elements.

    Size 0 with an empty witness means no non-trivial family exists.
    """
    _check_layer(layer_fam, t)
    faces = list(layer_fam.members)
    if not faces:
        return SearchResult(0, layer_fam.with_members([]), 0)
    search = _CliqueSearch(faces, t, budget, forbid_core=True,
                           symmetry=symmetry, spectral=spectral)
    search.run()
    if search.best_clique:
        assert common_core(search.witness_faces()).bit_count() < t
    return SearchResult(search.best, layer_fam.with_members(search.witness_faces()),
                        search.stats.nodes)


@dataclass(frozen=True)
class ExtremalResult:
    k: int
    t: int
    rank: int
    layer_size: int
    max_size: int
    witness: SetFamily
    trivial: bool
    best_star_size: int
    best_star_T: Face
    star_optimal: bool
    borg_threshold_met: bool
    nodes: int

    @property
    def counterexample_candidate(self) -> bool:
        """A star loses even though the rank meets (t+1)(k-t+1)."""
        return self.borg_threshold_met and not self.star_optimal


def borg_threshold(k: int, t: int) -> int:
    return (t + 1) * (k - t + 1)


def ekr_verdict(cx: Complex, k: int, t: int,
                budget: int = DEFAULT_BUDGET) -> ExtremalResult:
    """Compare the largest t-intersecting family in layer ``k`` with the best star."""
    if not 1 <= t <= k:
        raise InvalidArgument("need 1 <= t <= k")
    n = rank(cx)
    if k > n:
        raise InvalidArgument(f"k={k} exceeds the rank {n}")
    fam = layer(cx, k)
    found = max_t_intersecting(fam, t, budget)
    star = best_star_in(fam, t)
    trivial = bool(found.witness) and common_core(found.witness).bit_count() >= t
    return ExtremalResult(
        k=k, t=t, rank=n, layer_size=len(fam),
        max_size=found.size, witness=found.witness, trivial=trivial,
        best_star_size=star.size, best_star_T=star.T,
        star_optimal=found.size == star.size,
        borg_threshold_met=n >= borg_threshold(k, t),
        nodes=found.nodes)
