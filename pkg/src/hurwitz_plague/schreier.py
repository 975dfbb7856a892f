"""Quotients of braid spaces by the centre, as Schreier graphs of PSL(2,Z).

Vertex ``k`` is displayed as ``v{k+1}``.  ``x`` is the image of
σ2⁻¹σ1⁻¹ and ``y`` the image of σ1σ2σ1 (rightmost letter acts first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .orbits import BraidSpace, InvariantError, compose, invert, perm_cycles
from .racks import InputError


@dataclass
class SchreierGraph:
    x: list
    y: list
    v0: Optional[int] = None
    names: Optional[list] = None

    def __post_init__(self):
        self.x = [int(v) for v in self.x]
        self.y = [int(v) for v in self.y]
        n = len(self.x)
        if len(self.y) != n or n == 0:
            raise InputError("x and y must be permutations of the same non-empty set")
        for p in (self.x, self.y):
            if sorted(p) != list(range(n)):
                raise InputError(f"{p} is not a permutation")
        if compose(self.x, self.x, self.x) != list(range(n)):
            raise InputError("x does not have order dividing 3")
        if compose(self.y, self.y) != list(range(n)):
            raise InputError("y is not an involution")
        if self.v0 is not None and not 0 <= self.v0 < n:
            raise InputError("v0 out of range")

    @property
    def n(self) -> int:
        return len(self.x)

    def name(self, v: int) -> str:
        return self.names[v] if self.names else f"v{v + 1}"

    @property
    def xy(self) -> list:
        """v ↦ x(y(v))."""
        return compose(self.x, self.y)

    @property
    def yx(self) -> list:
        return compose(self.y, self.x)

    def is_connected(self) -> bool:
        seen, todo = {0}, [0]
        xi = invert(self.x)
        while todo:
            v = todo.pop()
            for w in (self.x[v], xi[v], self.y[v]):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    def triangles(self) -> List[tuple]:
        return [tuple(c) for c in perm_cycles(self.x) if len(c) == 3]

    def to_json(self) -> dict:
        return {"n": self.n, "x": list(self.x), "y": list(self.y), "v0": self.v0}


def graph_from_json(data: dict) -> SchreierGraph:
    try:
        g = SchreierGraph(data["x"], data["y"], data.get("v0"))
    except KeyError as exc:
        raise InputError(f"graph JSON missing {exc}") from None
    if data.get("n", g.n) != g.n:
        raise InputError("'n' does not match the permutations")
    return g


@dataclass
class FixedSets:
    V_x: list
    V_y: list
    V_xy: list


@dataclass
class QuotientMap:
    fiber_of: list
    N: int
    fibers: list = field(default_factory=list)
    section: list = field(default_factory=list)


def quotient(space: BraidSpace):
    """Return (SchreierGraph, QuotientMap) for the Δ-orbits of ``space``."""
    delta = list(space.delta().perm)
    cycles = perm_cycles(delta)  # already ordered by smallest member
    sizes = {len(c) for c in cycles}
    if len(sizes) != 1:
        raise InvariantError(f"fibers of unequal size {sorted(sizes)}")
    fiber_of = [0] * space.size
    for k, c in enumerate(cycles):
        for p in c:
            fiber_of[p] = k
    g_op = compose(invert(space.sigma2), invert(space.sigma1))
    h_op = compose(space.sigma1, space.sigma2, space.sigma1)
    x = [fiber_of[g_op[c[0]]] for c in cycles]
    y = [fiber_of[h_op[c[0]]] for c in cycles]
    for c in cycles:
        for p in c:
            if fiber_of[g_op[p]] != x[fiber_of[p]] or fiber_of[h_op[p]] != y[fiber_of[p]]:
                raise InvariantError("x or y not constant on a fiber")
    graph = SchreierGraph(x, y)
    qmap = QuotientMap(fiber_of, sizes.pop(), [list(c) for c in cycles], [c[0] for c in cycles])
    return graph, qmap


def classify_fixed(graph: SchreierGraph) -> FixedSets:
    xy = graph.xy
    return FixedSets(
        [v for v in range(graph.n) if graph.x[v] == v],
        [v for v in range(graph.n) if graph.y[v] == v],
        [v for v in range(graph.n) if xy[v] == v],
    )


def xy_cycles(graph: SchreierGraph) -> List[List[int]]:
    return perm_cycles(graph.xy)


def yx_cycles(graph: SchreierGraph) -> List[List[int]]:
    return perm_cycles(graph.yx)


def signature(graph: SchreierGraph) -> str:
    lengths = sorted((len(c) for c in xy_cycles(graph)), reverse=True)
    return f"{graph.n}{{{','.join(map(str, lengths))}}}"


def _vertex_invariant(graph: SchreierGraph, v: int, xy_len, yx_len):
    return (graph.x[v] == v, graph.y[v] == v, xy_len[v], yx_len[v])


def isomorphisms(g1: SchreierGraph, g2: SchreierGraph, respect_point: bool = False):
    """Yield every vertex bijection f with f∘x1 = x2∘f and f∘y1 = y2∘f.

    Connected graphs: once one vertex image is fixed the rest is forced, so
    we try every admissible image of a single start vertex.
    """
    if g1.n != g2.n or signature(g1) != signature(g2):
        return
    if respect_point and (g1.v0 is None) != (g2.v0 is None):
        return

    def lengths(g):
        out = [0] * g.n
        for c in xy_cycles(g):
            for v in c:
                out[v] = len(c)
        out2 = [0] * g.n
        for c in yx_cycles(g):
            for v in c:
                out2[v] = len(c)
        return out, out2

    l1, l2 = lengths(g1), lengths(g2)
    start = g1.v0 if respect_point and g1.v0 is not None else 0
    inv1 = _vertex_invariant(g1, start, *l1)
    candidates = [g2.v0] if respect_point and g2.v0 is not None else range(g2.n)
    x1i, x2i = invert(g1.x), invert(g2.x)
    for target in candidates:
        if _vertex_invariant(g2, target, *l2) != inv1:
            continue
        f = {start: target}
        todo = [start]
        ok = True
        while todo and ok:
            v = todo.pop()
            for a, b in ((g1.x, g2.x), (g1.y, g2.y), (x1i, x2i)):
                w, w2 = a[v], b[f[v]]
                if w in f:
                    if f[w] != w2:
                        ok = False
                        break
                else:
                    f[w] = w2
                    todo.append(w)
        if ok and len(f) == g1.n and len(set(f.values())) == g1.n:
            yield [f[v] for v in range(g1.n)]


def find_isomorphism(g1: SchreierGraph, g2: SchreierGraph, respect_point: bool = False):
    """The first isomorphism found, or None."""
    return next(isomorphisms(g1, g2, respect_point), None)


def are_isomorphic(g1: SchreierGraph, g2: SchreierGraph, respect_point: bool = False) -> bool:
    return find_isomorphism(g1, g2, respect_point) is not None


def relabel(graph: SchreierGraph, perm: Sequence[int]) -> SchreierGraph:
    """Copy of ``graph`` with vertex v renamed perm[v]."""
    n = graph.n
    x = [0] * n
    y = [0] * n
    for v in range(n):
        x[perm[v]] = perm[graph.x[v]]
        y[perm[v]] = perm[graph.y[v]]
    v0 = None if graph.v0 is None else perm[graph.v0]
    return SchreierGraph(x, y, v0)


def export_dot(graph: SchreierGraph, cov=None) -> str:
    """DOT text: solid directed x-arrows, dashed undirected y-edges."""
    lines = ["digraph schreier {"]
    for v in range(graph.n):
        shape = ' shape=doublecircle' if v == graph.v0 else ''
        lines.append(f'  {graph.name(v)} [label="{graph.name(v)}"{shape}];')
    for v in range(graph.n):
        w = graph.x[v]
        lab = ""
        if cov is not None:
            lab = f' label="{cov.label_text("x", v)}"'
        lines.append(f"  {graph.name(v)} -> {graph.name(w)} [style=solid{lab}];")
    for v in range(graph.n):
        w = graph.y[v]
        if w < v:
            continue
        lab = ""
        if cov is not None:
            if w == v:
                lab = f' label="{cov.label_text("y", v)}"'
            else:
                lab = (f' headlabel="{cov.label_text("y", v)}"'
                       f' taillabel="{cov.label_text("y", w)}"')
        lines.append(f"  {graph.name(v)} -> {graph.name(w)} [style=dashed dir=none{lab}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot_edges(text: str) -> list:
    """Minimal reader for the DOT emitted above: (tail, head, style) triples."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if "->" not in line:
            continue
        lhs, rest = line.split("[", 1)
        tail, head = (s.strip() for s in lhs.split("->"))
        style = "dashed" if "style=dashed" in rest else "solid"
        out.append((tail, head, style))
    return out
