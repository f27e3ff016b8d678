import json
from itertools import combinations
from pathlib import Path

import pytest

from spreadkit import cli

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"
SCHEMA = ROOT / "docs" / "report.schema.json"

# Filled by the acceptance suite, printed at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def brute_max_t_intersecting(members, t, forbid_core=False):
    """Largest t-intersecting subfamily by trying every subfamily (tiny inputs)."""
    members = list(members)
    best = 0
    for mask in range(1, 1 << len(members)):
        chosen = [members[i] for i in range(len(members)) if mask >> i & 1]
        if len(chosen) <= best:
            continue
        if any((a & b).bit_count() < t for a, b in combinations(chosen, 2)):
            continue
        if any(a.bit_count() < t for a in chosen):
            continue
        if forbid_core:
            core = chosen[0]
            for f in chosen[1:]:
                core &= f
            if core.bit_count() >= t:
                continue
        best = len(chosen)
    return best


def maximal_cliques(members, t):
    """Every maximal t-intersecting subfamily (plain Bron-Kerbosch, no bounds)."""
    n = len(members)
    nbr = [{j for j in range(n) if j != i and (members[i] & members[j]).bit_count() >= t}
           for i in range(n)]
    out = []

    def bk(r, p, x):
        if not p and not x:
            out.append(r)
            return
        for v in list(p):
            bk(r + [v], p & nbr[v], x & nbr[v])
            p = p - {v}
            x = x | {v}

    bk([], set(range(n)), set())
    return [[members[i] for i in c] for c in out]


def exhaustive_nontrivial(members, t):
    # A non-trivial family stays non-trivial when enlarged, so the optimum
    # is attained by a maximal clique.
    best = 0
    for c in maximal_cliques(members, t):
        core = c[0]
        for f in c[1:]:
            core &= f
        if core.bit_count() < t:
            best = max(best, len(c))
    return best


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    def runner(*argv):
        _, code = cli.run([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err
    return runner


@pytest.fixture
def run_json(run_cli):
    def runner(*argv):
        code, out, err = run_cli(*argv, "--format", "json")
        return code, (json.loads(out) if out else None), out
    return runner


@pytest.fixture(scope="session")
def schema():
    return json.loads(SCHEMA.read_text())
