"""Command-line entry point: ``spreadkit <command> ...``.

Exit codes: 0 pass, 2 usage or input error, 3 counterexample candidate,
4 search budget exhausted, 5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Optional

from .checks import Verification
from .complex import Complex, best_star, layer, rank
from .decomposition import (parameter_plan, spread_approximation, stability_bound,
                            verify_decomposition)
from .faces import InvalidArgument, elements, face_of
from .ingest import ParseError, load_complex, parse_family
from .oracle import (DEFAULT_BUDGET, BudgetExceeded, ekr_verdict, max_nontrivial_t_intersecting,
                     max_t_intersecting, borg_threshold)
from .problab import (exact_cover_probability, exact_two_coloring_probability,
                      spread_cover_probability, two_coloring_experiment)
from .report import PASS, Report, canonical_value, digest
from .rng import Xoshiro256
from .spreadness import (lemma_spread_check, local_lym_check, restriction_bound_check,
                         spread_value)

EXIT_OK, EXIT_USAGE, EXIT_CANDIDATE, EXIT_BUDGET, EXIT_FAIL = 0, 2, 3, 4, 5
SUFFIXES = (".facets", ".graph")


class UsageError(Exception):
    pass


def _faces(fs) -> list[list[int]]:
    return [elements(f) for f in fs]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _int_range(text: str) -> list[int]:
    out: set[int] = set()
    try:
        for part in text.split(","):
            lo, _, hi = part.partition("-")
            out.update(range(int(lo), int(hi or lo) + 1))
    except ValueError:
        raise UsageError(f"bad range {text!r} (use e.g. 1-4 or 1,3)") from None
    return sorted(out)


def _load(path: str, as_graph: bool) -> tuple[Complex, bytes]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return load_complex(p, True if as_graph else None), p.read_bytes()


# -- analyze --------------------------------------------------------------------

def cmd_analyze(args) -> tuple[Report, int]:
    cx, raw = _load(args.input, args.graph)
    n = rank(cx)
    rep = Report("analyze", digest([raw]), params={"k": args.k, "graph": bool(args.graph)})
    res = {"rank": n, "ground_n": cx.ground_n, "facets": len(cx.facets), "warnings": []}
    fam = layer(cx, args.k)
    res["layer_size"] = len(fam)
    if fam:
        sv = spread_value(fam)
        res["r_star"] = sv.r_star
        res["r_star_witness"] = None if sv.witness is None else elements(sv.witness)
        res["r_star_ratio"] = sv.ratio
    v = Verification()
    if args.k == 0:
        res["lemma_spread"] = {"holds": True, "note": "layer k=0 holds only the empty face"}
    elif args.k > n:
        res["warnings"].append(f"k={args.k} exceeds rank {n}; lemma checks skipped")
    else:
        lem = lemma_spread_check(cx, args.k)
        res["lemma_spread"] = {"holds": lem.holds, "r": Fraction(n, args.k), "q": args.k,
                               "witness": None if lem.witness is None
                               else [elements(x) for x in lem.witness]}
        v.add("lemma_spread", lem.holds, witness=res["lemma_spread"]["witness"])
        lym = local_lym_check(cx, args.k)
        res["local_lym"] = {"holds": lym.holds, "worst_ratio": lym.worst_ratio,
                            "element": lym.witness, "bound": lym.bound}
        v.add("local_lym", lym.holds, witness=lym.witness, worst_ratio=lym.worst_ratio)
    rep.results = res
    rep.absorb(v)
    return rep, EXIT_OK if rep.status == PASS else EXIT_FAIL


# -- decompose ------------------------------------------------------------------

def _step(st) -> dict:
    return {"family_size": st.family_size, "chosen": elements(st.chosen),
            "trace_size": st.trace_size,
            "density": Fraction(st.trace_size, st.family_size)}


def cmd_decompose(args) -> tuple[Report, int]:
    cx, raw = _load(args.input, args.graph)
    n = rank(cx)
    if not 1 <= args.t <= args.k <= n:
        raise UsageError(f"need 1 <= t <= k <= rank={n}")
    ambient = layer(cx, args.k)
    chunks = [raw]
    if args.family:
        fpath = Path(args.family)
        if not fpath.is_file():
            raise UsageError(f"no such file: {args.family}")
        chunks.append(fpath.read_bytes())
        F = parse_family(fpath.read_text(encoding="utf-8"), cx.ground_n)
        source = "file"
    else:
        T, _ = best_star(cx, args.k, args.t)
        F = ambient.with_members(f for f in ambient if f & T == T)
        source = f"best star {elements(T)}"
    r, q = _rational(args.r), args.q
    r0 = _rational(args.r0) if args.r0 else Fraction(n, args.k)
    star = best_star(cx, args.k, args.t).size
    rep = Report("decompose", digest(chunks),
                 params={"k": args.k, "t": args.t, "r": r, "q": q, "r0": r0,
                         "mode": args.mode, "family": source, "graph": bool(args.graph)})
    d = spread_approximation(F, ambient, r, q, args.mode)
    v = verify_decomposition(d, F, ambient, args.t, r0=r0 if r <= r0 else None, star=star)
    rep.results = {
        "family_size": len(F), "cover": _faces(d.cover),
        "piece_sizes": [len(p) for p in d.pieces], "remainder_size": len(d.remainder),
        "stop_reason": d.stop_reason,
        "last_set": None if d.last_set is None else elements(d.last_set),
        "trace": [_step(s) for s in d.trace], "best_star_size": star,
        "checks": {c.name: {"holds": c.holds, "binding": c.binding, **c.details}
                   for c in v.checks},
    }
    rep.absorb(v)
    return rep, EXIT_OK if rep.status == PASS else EXIT_FAIL


# -- extremal -------------------------------------------------------------------

def cmd_extremal(args) -> tuple[Report, int]:
    cx, raw = _load(args.input, args.graph)
    rep = Report("extremal", digest([raw]),
                 params={"k": args.k, "t": args.t, "budget": args.budget,
                         "nontrivial": args.nontrivial, "graph": bool(args.graph)})
    try:
        res = ekr_verdict(cx, args.k, args.t, args.budget)
        extra = None
        if args.nontrivial:
            extra = max_nontrivial_t_intersecting(layer(cx, args.k), args.t, args.budget)
    except BudgetExceeded as exc:
        rep.status = "budget_exhausted"
        rep.results = {"budget": exc.budget, "best_found": exc.best}
        return rep, EXIT_BUDGET
    rep.results = {
        "rank": res.rank, "layer_size": res.layer_size, "max_size": res.max_size,
        "witness": _faces(res.witness), "trivial": res.trivial,
        "best_star_size": res.best_star_size, "best_star_T": elements(res.best_star_T),
        "star_optimal": res.star_optimal, "borg_threshold": borg_threshold(args.k, args.t),
        "borg_threshold_met": res.borg_threshold_met, "nodes": res.nodes,
        "counterexample_candidate": res.counterexample_candidate,
    }
    if extra is not None:
        rep.results["max_nontrivial"] = extra.size
        rep.results["max_nontrivial_witness"] = _faces(extra.witness)
    if res.counterexample_candidate:
        rep.status = "counterexample_candidate"
        return rep, EXIT_CANDIDATE
    return rep, EXIT_OK


# -- verify ---------------------------------------------------------------------

def _corpus_files(args) -> list[Path]:
    if args.corpus:
        root = Path(args.corpus)
        if not root.is_dir():
            raise UsageError(f"not a directory: {args.corpus}")
        files = sorted(p for p in root.iterdir() if p.suffix in SUFFIXES)
        if not files:
            raise UsageError(f"corpus directory {args.corpus} holds no .facets/.graph files")
        return files
    if not args.input:
        raise UsageError("verify needs an input file or --corpus")
    p = Path(args.input)
    if not p.is_file():
        raise UsageError(f"no such file: {args.input}")
    return [p]


def golden_values(cx: Complex) -> dict:
    """Values recorded in ``<name>.golden.json`` files."""
    n = rank(cx)
    layers = {}
    for k in range(1, n + 1):
        lym = local_lym_check(cx, k)
        layers[str(k)] = {"size": len(layer(cx, k)), "worst_lym": lym.worst_ratio}
    return {"rank": n, "ground_n": cx.ground_n, "facets": len(cx.facets), "layers": layers}


def _compare_golden(v: Verification, got: dict, want: dict, prefix: str = "golden") -> None:
    got, want = canonical_value(got), canonical_value(want)
    for key in sorted(set(got) | set(want)):
        a, b = got.get(key), want.get(key)
        name = f"{prefix}.{key}"
        if isinstance(a, dict) and isinstance(b, dict):
            _compare_golden(v, a, b, name)
        else:
            v.add(name, a == b, expected=b, computed=a)


def _verify_instance(cx: Complex, ks: list[int], ts: list[int], samples: int,
                     rng: Xoshiro256, budget: int) -> tuple[Verification, dict]:
    n = rank(cx)
    v = Verification()
    counts = {"lemma_spread": 0, "local_lym": 0, "restriction": 0,
              "decomposition": 0, "frankl_wilson": 0, "budget_skipped": 0}
    ks = [k for k in ks if 1 <= k <= n]
    complete = len(cx.facets) == 1
    layers = {k: layer(cx, k) for k in ks}
    for k in ks:
        lem = lemma_spread_check(cx, k)
        v.add(f"lemma_spread[k={k}]", lem.holds,
              witness=None if lem.witness is None else [elements(x) for x in lem.witness])
        lym = local_lym_check(cx, k)
        v.add(f"local_lym[k={k}]", lym.holds, witness=lym.witness, worst_ratio=lym.worst_ratio)
        if complete:
            v.add(f"local_lym_exact[k={k}]", lym.worst_ratio == Fraction(k, n),
                  worst_ratio=lym.worst_ratio)
        counts["lemma_spread"] += 1
        counts["local_lym"] += 1
    # Restriction inequality on random (k, t, T, F) with s + k < rank.
    pairs = [(k, t) for k in ks for t in ts if t <= k < n]
    for _ in range(samples if pairs else 0):
        k, t = pairs[rng.randbelow(len(pairs))]
        fam = layers[k]
        base = fam.members[rng.randbelow(len(fam))]
        T = face_of(rng.sample(elements(base), t))
        pool = [e for e in range(1, cx.ground_n + 1) if not (T >> e) & 1]
        s = rng.randbelow(min(n - k - 1, len(pool)) + 1)
        F = face_of(rng.sample(pool, s))
        chk = restriction_bound_check(cx, k, t, T, F)
        v.add("restriction_bound", chk.holds, witness=[elements(T), elements(F)],
              k=k, t=t, lhs=chk.lhs, rhs=chk.rhs)
        counts["restriction"] += 1
    # Decomposition invariants on random subfamilies of a layer.
    rates = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]
    for _ in range(max(1, samples // 10) if pairs else 0):
        k, t = pairs[rng.randbelow(len(pairs))]
        fam = layers[k]
        want = min(len(fam), 1 + rng.randbelow(120))
        F = fam.with_members(rng.sample(list(fam.members), want))
        r = rates[rng.randbelow(len(rates))]
        q = rng.randbelow(k + 1)
        d = spread_approximation(F, fam, r, q)
        dv = verify_decomposition(d, F, fam, t)
        for c in dv.checks:
            v.add(f"decomposition.{c.name}", c.holds, c.binding,
                  run={"k": k, "r": r, "q": q}, **c.details)
        counts["decomposition"] += 1
    # Frankl-Wilson values on complete complexes.
    if complete:
        for k in ks:
            for t in ts:
                if t > k or n < borg_threshold(k, t):
                    continue
                try:
                    got = max_t_intersecting(layers[k], t, budget).size
                except BudgetExceeded:
                    counts["budget_skipped"] += 1
                    continue
                v.add(f"frankl_wilson[k={k},t={t}]", got == comb(n - t, k - t),
                      computed=got, expected=comb(n - t, k - t))
                counts["frankl_wilson"] += 1
    return v, counts


def cmd_verify(args) -> tuple[Report, int]:
    files = _corpus_files(args)
    ks, ts = _int_range(args.k_range), _int_range(args.t_range)
    chunks = []
    for f in files:
        chunks.append(f.name.encode())
        chunks.append(f.read_bytes())
    rep = Report("verify", digest(chunks), seed=args.seed,
                 params={"k_range": ks, "t_range": ts, "samples": args.samples,
                         "budget": args.budget, "instances": len(files)})
    per = {}
    total = {}
    for i, path in enumerate(files):
        cx = load_complex(path, True if args.graph else None)
        rng = Xoshiro256(args.seed + i)
        v, counts = _verify_instance(cx, ks, ts, args.samples, rng, args.budget)
        golden = path.with_name(path.stem + ".golden.json")
        if golden.is_file():
            _compare_golden(v, golden_values(cx), json.loads(golden.read_text()))
            counts["golden"] = 1
        per[path.name] = {"checks": len(v.checks), "violations": len(v.violations),
                          "rank": rank(cx), **counts}
        for key, val in counts.items():
            total[key] = total.get(key, 0) + val
        rep.absorb(v, path.name)
    rep.results = {"instances": per, "totals": total}
    return rep, EXIT_OK if rep.status == PASS else EXIT_FAIL


# -- montecarlo -----------------------------------------------------------------

def cmd_montecarlo(args) -> tuple[Report, int]:
    cx, raw = _load(args.input, args.graph)
    n = rank(cx)
    if not 1 <= args.k <= n:
        raise UsageError(f"need 1 <= k <= rank={n}")
    fam = layer(cx, args.k)
    params = {"k": args.k, "p": args.p, "trials": args.trials,
              "two_color": args.two_color, "graph": bool(args.graph)}
    res: dict = {"layer_size": len(fam)}
    if args.two_color:
        excluded = face_of(_int_range(args.exclude)) if args.exclude else 0
        params["exclude"] = elements(excluded)
        g = fam.with_members(f for f in fam if not f & excluded)
        out = two_coloring_experiment(g, g, excluded, args.trials, args.seed, args.threads)
        try:
            res["exact"] = exact_two_coloring_probability(g, g, excluded)
        except InvalidArgument:
            res["exact"] = None
    else:
        r = _rational(args.r) if args.r else Fraction(n, args.k)
        delta = args.p / args.m
        params.update(r=r, m=args.m, delta=delta)
        out = spread_cover_probability(fam, r, args.m, delta, args.trials, args.seed,
                                       args.threads)
        try:
            res["exact"] = exact_cover_probability(fam, args.p)
        except InvalidArgument:
            res["exact"] = None
    res.update(successes=out.successes, estimate=out.estimate, std_err=out.std_err,
               bound=out.bound, vacuous=out.vacuous, consistent=out.consistent,
               side_rates=None if out.side_rates is None else list(out.side_rates),
               both_sides_above_half=out.both_sides_above_half)
    rep = Report("montecarlo", digest([raw]), params=params, results=res, seed=args.seed)
    v = Verification()
    v.add("bound_vs_estimate", out.consistent, estimate=out.estimate,
          std_err=out.std_err, bound=out.bound)
    rep.absorb(v)
    return rep, EXIT_OK if rep.status == PASS else EXIT_FAIL


# -- plan -----------------------------------------------------------------------

def cmd_plan(args) -> tuple[Report, int]:
    try:
        plan = parameter_plan(args.n, args.k, args.t)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None
    params = {"n": args.n, "k": args.k, "t": args.t}
    res = {key: getattr(plan, key) for key in plan.__dataclass_fields__}
    res["hypotheses_met"] = plan.hypotheses_met
    if args.star is not None:
        m = args.m or 0
        params.update(star=args.star, m=m)
        res["stability_bound"] = stability_bound(args.star, m, args.n, args.k)
    return Report("plan", digest([json.dumps(params, sort_keys=True).encode()]),
                  params=params, results=res), EXIT_OK


# -- plumbing -------------------------------------------------------------------

COMMANDS = {"analyze": cmd_analyze, "decompose": cmd_decompose, "extremal": cmd_extremal,
            "verify": cmd_verify, "montecarlo": cmd_montecarlo, "plan": cmd_plan}


def _default_threads() -> int:
    raw = os.environ.get("SPREADKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads (default: $SPREADKIT_THREADS or 1)")
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true",
                        help="record wall-clock runtime (makes reports non-reproducible)")
    common.add_argument("--graph", action="store_true",
                        help="read the input as a graph regardless of its suffix")

    parser = argparse.ArgumentParser(prog="spreadkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="spreadness and layer lemmas")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("decompose", parents=[common], help="run and verify spread approximation")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--r", default="2", help="rational spreadness, e.g. 3/2")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--r0", help="ambient spreadness for the remainder bound (default rank/k)")
    p.add_argument("--family", help="family file (default: the best star)")
    p.add_argument("--mode", choices=("greedy", "exhaustive"), default="greedy")

    p = sub.add_parser("extremal", parents=[common], help="largest t-intersecting family vs stars")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--nontrivial", action="store_true",
                   help="also compute the largest non-trivial family")

    p = sub.add_parser("verify", parents=[common], help="unconditional checks over a corpus")
    p.add_argument("input", nargs="?")
    p.add_argument("--corpus")
    p.add_argument("--k-range", default="1-3")
    p.add_argument("--t-range", default="1-2")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("montecarlo", parents=[common], help="random-set experiments")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True, help="inclusion probability m*delta")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--r", help="spreadness used for the bound (default rank/k)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--two-color", action="store_true")
    p.add_argument("--exclude", help="elements left out of both colour classes")

    p = sub.add_parser("plan", parents=[common], help="parameters of the large-n star bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--star", type=int)
    p.add_argument("--m", type=int)
    return parser


def run(argv: Optional[list[str]] = None) -> tuple[Optional[Report], int]:
    """Parse ``argv`` and execute; returns the report (None on error) and exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.threads < 1:
        print("spreadkit: --threads must be >= 1", file=sys.stderr)
        return None, EXIT_USAGE
    start = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](args)
    except (UsageError, InvalidArgument, ParseError, OSError) as exc:
        print(f"spreadkit: error: {exc}", file=sys.stderr)
        return None, EXIT_USAGE
    if args.timing:
        rep.runtime_ms = int((time.perf_counter() - start) * 1000)
    text = rep.to_json() if args.format == "json" else rep.to_table()
    if args.output:
        Path(args.output).write_text(rep.to_json() if args.format == "json" else text,
                                     encoding="utf-8")
    else:
        sys.stdout.write(text)
    return rep, code


def main(argv: Optional[list[str]] = None) -> int:
    return run(argv)[1]


if __name__ == "__main__":
    sys.exit(main())
