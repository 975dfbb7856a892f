import random
from itertools import permutations

import pytest

from hurwitz_plague.coverings import generic_template
from hurwitz_plague.orbits import enumerate_orbit
from hurwitz_plague.racks import builtin_rack
from hurwitz_plague.schreier import SchreierGraph

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def s3():
    return builtin_rack("S3-transpositions")


@pytest.fixture(scope="session")
def s3_orbit8(s3):
    return enumerate_orbit(s3, (0, 1, 2))


def random_graph(rng: random.Random, n: int) -> SchreierGraph:
    """Random connected Schreier graph on n vertices (may retry)."""
    while True:
        verts = list(range(n))
        rng.shuffle(verts)
        x = list(range(n))
        i = 0
        while i < n:
            if n - i >= 3 and rng.random() < 0.7:
                a, b, c = verts[i:i + 3]
                x[a], x[b], x[c] = b, c, a
                i += 3
            else:
                i += 1
        rng.shuffle(verts)
        y = list(range(n))
        i = 0
        while i < n:
            if n - i >= 2 and rng.random() < 0.75:
                a, b = verts[i:i + 2]
                y[a], y[b] = b, a
                i += 2
            else:
                i += 1
        g = SchreierGraph(x, y)
        if g.is_connected():
            return g


def random_covering(rng: random.Random, graph: SchreierGraph, N: int):
    """Random labels on ``graph`` satisfying the local constraints, or None."""
    t = generic_template(graph)
    values = {}
    loops = {}
    for v in range(graph.n):
        for perm, expr, (mult, rhs) in ((graph.x, t.x_expr, (3, -1)), (graph.y, t.y_expr, (2, 1))):
            if perm[v] == v and len(expr[v]) == 1:
                (sym, coef), = expr[v].items()
                if sym:
                    loops[sym] = (mult, rhs)
    for sym, (mult, rhs) in loops.items():
        sols = [a for a in range(N) if (mult * a - rhs) % N == 0]
        if not sols:
            return None
        values[sym] = rng.choice(sols)
    for sym in t.symbols:
        values.setdefault(sym, rng.randrange(N))
    return t.instantiate(N, values)


def small_graphs(max_n: int):
    """Every connected Schreier graph on at most max_n vertices (not up to isomorphism)."""
    out = []
    for n in range(1, max_n + 1):
        seen = set()
        for x in permutations(range(n)):
            if any(x[x[x[v]]] != v for v in range(n)):
                continue
            for y in permutations(range(n)):
                if any(y[y[v]] != v for v in range(n)):
                    continue
                g = SchreierGraph(list(x), list(y))
                if (tuple(x), tuple(y)) in seen or not g.is_connected():
                    continue
                seen.add((tuple(x), tuple(y)))
                out.append(g)
    return out

