"""Write the shipped verification corpus and its golden files.

Usage: python scripts/build_corpus.py corpus/

Golden values are computed here by plain brute force over frozensets (no
bitmasks, no library layer code) so that ``spreadkit verify`` compares
against an independent computation.
"""
import json
import sys
from collections import Counter
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from spreadkit.ingest import (Graph, format_facets, format_graph, gen_complete, gen_graph,
                              gen_random)

PATHS = range(4, 17)
CYCLES = range(4, 17)
GNP = [(8, 0.3, 11), (10, 0.2, 12), (10, 0.4, 13), (12, 0.2, 14), (12, 0.3, 15),
       (14, 0.15, 16), (14, 0.25, 17), (16, 0.1, 18), (16, 0.2, 19), (16, 0.3, 20)]
FACETS = [(8, 4, 4, 6, 31), (10, 5, 5, 7, 32), (10, 8, 4, 5, 33), (12, 6, 6, 8, 34),
          (12, 10, 5, 7, 35), (14, 5, 7, 9, 36), (14, 12, 6, 8, 37), (16, 6, 8, 10, 38),
          (16, 12, 6, 9, 39), (16, 20, 5, 6, 40)]


def brute_independent_facets(n, edges):
    adj = {frozenset(e) for e in edges}
    indep = []
    for mask in range(1 << n):
        s = [v + 1 for v in range(n) if mask >> v & 1]
        if all(frozenset(pair) not in adj for pair in combinations(s, 2)):
            indep.append(frozenset(s))
    pool = set(indep)
    return [s for s in indep if not any(s | {v} in pool for v in range(1, n + 1) if v not in s)]


def golden(n_ground, facets):
    facets = [frozenset(f) for f in facets]
    facets = [f for f in facets if not any(f < g for g in facets)]
    rank = min(len(f) for f in facets)
    layers = {}
    for k in range(1, rank + 1):
        lay = {frozenset(c) for f in facets for c in combinations(sorted(f), k)}
        deg = Counter(x for s in lay for x in s)
        worst = Fraction(max(deg.values()), len(lay))
        layers[str(k)] = {"size": len(lay), "worst_lym": f"{worst.numerator}/{worst.denominator}"
                          if worst.denominator != 1 else str(worst.numerator)}
    return {"rank": rank, "ground_n": n_ground, "facets": len(set(facets)), "layers": layers}


def write_golden(path: Path, values) -> None:
    path.with_name(path.stem + ".golden.json").write_text(
        json.dumps(values, sort_keys=True, indent=2) + "\n")


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for n in range(1, 15):
        path = out / f"complete_{n:02d}.facets"
        path.write_text(format_facets(gen_complete(n)))
        write_golden(path, golden(n, [range(1, n + 1)]))
    for n in PATHS:
        g = Graph.of(n, [(i, i + 1) for i in range(1, n)])
        path = out / f"path_{n:02d}.graph"
        path.write_text(format_graph(g))
        write_golden(path, golden(n, brute_independent_facets(n, g.edges)))
    for n in CYCLES:
        g = Graph.of(n, [(i, i + 1) for i in range(1, n)] + [(n, 1)])
        path = out / f"cycle_{n:02d}.graph"
        path.write_text(format_graph(g))
        write_golden(path, golden(n, brute_independent_facets(n, g.edges)))
    for n, p, seed in GNP:
        g = gen_graph(n, p, seed)
        path = out / f"gnp_{n:02d}_{int(p * 100):02d}_s{seed}.graph"
        path.write_text(format_graph(g))
        write_golden(path, golden(n, brute_independent_facets(n, g.edges)))
    for n, count, lo, hi, seed in FACETS:
        cx = gen_random("random_facets", seed, n=n, count=count, min_size=lo, max_size=hi)
        path = out / f"facets_{n:02d}_{count:02d}_s{seed}.facets"
        path.write_text(format_facets(cx))
        write_golden(path, golden(n, [[e for e in range(1, n + 1) if f >> e & 1]
                                      for f in cx.facets]))


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "corpus"))
