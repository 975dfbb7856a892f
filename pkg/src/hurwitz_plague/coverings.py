"""Labeled coverings of Schreier graphs and their lifts to B3-spaces.

A covering stores one residue per arrow: ``x_label[v]`` for v → x(v) and
``y_label[v]`` for v → y(v).  The lift has points (v, i), i in Z_N, with

    g(v, i) = (x v, i + x_label[v])      (image of σ2⁻¹σ1⁻¹)
    h(v, i) = (y v, i + y_label[v])      (image of σ1σ2σ1)

and σ1 = g∘h, σ2 = h∘g.  Then h² = Δ and g³ = Δ⁻¹ where Δ shifts i by one,
which is where the "triangle sums to −1, y-pair sums to 1" rules come from.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .orbits import BraidSpace, InvariantError, compose, invert, is_simply_intersecting
from .racks import InputError
from .schreier import (QuotientMap, SchreierGraph, graph_from_json, quotient, relabel, signature,
                       xy_cycles, yx_cycles)

Arrow = Tuple[str, int]  # ("x", v) is v -> x(v); ("y", v) is v -> y(v)


def order_mod(label: int, N: int) -> int:
    """|<label>| in Z_N; the trivial subgroup has order 1."""
    return N // gcd(label % N, N) if label % N else 1


@dataclass
class LabeledCovering:
    graph: SchreierGraph
    N: int
    x_label: list
    y_label: list
    tree: frozenset = frozenset()
    symbols: Optional[dict] = None  # symbol values when built from a template

    def __post_init__(self):
        if self.N < 1:
            raise InputError("N must be >= 1")
        n = self.graph.n
        if len(self.x_label) != n or len(self.y_label) != n:
            raise InputError("one x label and one y label per vertex expected")
        self.x_label = [int(v) % self.N for v in self.x_label]
        self.y_label = [int(v) % self.N for v in self.y_label]
        self.tree = frozenset((str(k), int(v)) for k, v in self.tree)

    def label(self, arrow: Arrow) -> int:
        kind, v = arrow
        return self.x_label[v] if kind == "x" else self.y_label[v]

    def label_text(self, kind: str, v: int) -> str:
        return str(self.label((kind, v)))

    def free_labels(self) -> tuple:
        """Labels of arrows outside the tree, in arrow order."""
        out = []
        for v in range(self.graph.n):
            for kind in ("x", "y"):
                if (kind, v) not in self.tree:
                    out.append(self.label((kind, v)))
        return tuple(out)

    def name(self) -> str:
        if self.symbols:
            vals = ",".join(str(v) for v in self.symbols.values())
        else:
            vals = ",".join(map(str, self.free_labels()))
        return f"{signature(self.graph)};N={self.N};({vals})"

    def to_json(self) -> dict:
        out = {
            "graph": self.graph.to_json(),
            "N": self.N,
            "x_labels": {str(v): l for v, l in enumerate(self.x_label)},
            "y_labels": {str(v): l for v, l in enumerate(self.y_label)},
            "tree": sorted([k, v] for k, v in self.tree),
        }
        if self.symbols:
            out["symbols"] = dict(self.symbols)
        return out


def covering_from_json(data: dict) -> LabeledCovering:
    try:
        graph = graph_from_json(data["graph"])
        n = graph.n

        def read(key):
            raw = data[key]
            if isinstance(raw, list):
                return [int(v) for v in raw]
            vals = [0] * n
            for k, v in raw.items():
                vals[int(k)] = int(v)
            return vals

        return LabeledCovering(graph, int(data["N"]), read("x_labels"), read("y_labels"),
                               frozenset(tuple(a) for a in data.get("tree", [])),
                               data.get("symbols"))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad covering JSON: {exc}") from None


# -- spanning trees and derivation ---------------------------------------


def spanning_tree(graph: SchreierGraph, root: Optional[int] = None) -> List[Arrow]:
    """BFS tree from the root, trying x, then x⁻¹, then y at each vertex."""
    root = (graph.v0 or 0) if root is None else root
    xi = invert(graph.x)
    seen = {root}
    queue = deque([root])
    tree = []
    while queue:
        u = queue.popleft()
        for w, arrow in ((graph.x[u], ("x", u)), (xi[u], ("x", xi[u])), (graph.y[u], ("y", u))):
            if w not in seen:
                seen.add(w)
                tree.append(arrow)
                queue.append(w)
    return tree


def _tree_walk(graph: SchreierGraph, tree: Sequence[Arrow], root: int):
    """Yield (u, w, arrow, forward) in the order vertices are reached."""
    adj: Dict[int, list] = {v: [] for v in range(graph.n)}
    for kind, v in tree:
        w = graph.x[v] if kind == "x" else graph.y[v]
        adj[v].append((w, (kind, v), True))
        adj[w].append((v, (kind, v), False))
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w, arrow, fwd in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
                yield u, w, arrow, fwd
    if len(seen) != graph.n:
        raise InputError("arrows do not span the graph")


@dataclass
class DerivedCovering:
    covering: LabeledCovering
    point_of: list  # point_of[v * N + i] = orbit point for v[i]


def derive_labels(space: BraidSpace, qmap: QuotientMap, graph: SchreierGraph,
                  tree: Optional[Sequence[Arrow]] = None) -> DerivedCovering:
    """Read arrow labels off an explicit space with respect to a spanning tree."""
    N = qmap.N
    root = graph.v0 or 0
    tree = list(spanning_tree(graph, root) if tree is None else tree)
    g_op = compose(invert(space.sigma2), invert(space.sigma1))
    h_op = compose(space.sigma1, space.sigma2, space.sigma1)
    g_inv, h_inv = invert(g_op), invert(h_op)
    delta = list(space.delta().perm)
    section = [None] * graph.n
    section[root] = qmap.fibers[root][0]
    for u, w, (kind, v), fwd in _tree_walk(graph, tree, root):
        if kind == "x":
            section[w] = g_op[section[u]] if fwd else g_inv[section[u]]
        else:
            section[w] = h_op[section[u]] if fwd else h_inv[section[u]]
    # exponent of each point relative to its fiber's section
    expo = [0] * space.size
    point_of = [0] * (graph.n * N)
    for v in range(graph.n):
        p = section[v]
        for i in range(N):
            expo[p] = i
            point_of[v * N + i] = p
            p = delta[p]
    xl = [expo[g_op[section[v]]] for v in range(graph.n)]
    yl = [expo[h_op[section[v]]] for v in range(graph.n)]
    qmap.section = list(section)
    cov = LabeledCovering(graph, N, xl, yl, frozenset(tree))
    for arrow in cov.tree:
        if cov.label(arrow) != 0:
            raise InvariantError(f"tree arrow {arrow} got label {cov.label(arrow)}")
    return DerivedCovering(cov, point_of)


def covering_of(space: BraidSpace) -> DerivedCovering:
    graph, qmap = quotient(space)
    return derive_labels(space, qmap, graph)


# -- cycle labels and constraints -----------------------------------------


def _step(cov: LabeledCovering, v: int, kind: str) -> Tuple[int, int]:
    """One step of x∘y (kind 'xy') or y∘x ('yx') and its label."""
    g = cov.graph
    if kind == "xy":
        w = g.y[v]
        return g.x[w], cov.y_label[v] + cov.x_label[w]
    if kind == "yx":
        w = g.x[v]
        return g.y[w], cov.x_label[v] + cov.y_label[w]
    raise InputError("kind must be 'xy' or 'yx'")


def path_label(cov: LabeledCovering, v: int, w: int, kind: str) -> Optional[int]:
    """Label of the xy- (or yx-) path from v to w; None if w is not on it."""
    total, u = 0, v
    for _ in range(cov.graph.n):
        u, l = _step(cov, u, kind)
        total += l
        if u == w:
            return total % cov.N
    return None


def cycle_label(cov: LabeledCovering, cycle: Sequence[int], kind: str) -> int:
    cycle = list(cycle)
    total = 0
    for k, v in enumerate(cycle):
        w, l = _step(cov, v, kind)
        if w != cycle[(k + 1) % len(cycle)]:
            raise InputError(f"{cycle} is not an {kind}-cycle")
        total += l
    return total % cov.N


def cycle_through(cov: LabeledCovering, v: int, kind: str) -> list:
    cyc, u = [v], _step(cov, v, kind)[0]
    while u != v:
        cyc.append(u)
        u = _step(cov, u, kind)[0]
    return cyc


def sigma_cycle_lengths(cov: LabeledCovering, v: int) -> Tuple[int, int]:
    c1 = cycle_through(cov, v, "xy")
    c2 = cycle_through(cov, v, "yx")
    return (len(c1) * order_mod(cycle_label(cov, c1, "xy"), cov.N),
            len(c2) * order_mod(cycle_label(cov, c2, "yx"), cov.N))


@dataclass
class ConstraintReport:
    entries: list = field(default_factory=list)  # (rule, where, passed)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e[2]]

    def add(self, rule, where, ok):
        self.entries.append((rule, where, bool(ok)))


def check_constraints(cov: LabeledCovering, simply_intersecting_required: bool = True,
                      pairs: bool = True) -> ConstraintReport:
    """Label conditions; the cycle-label ones are only necessary for simple intersection.

    ``pairs=False`` skips the xy/yx path-label comparison and keeps the rest.
    """
    g, N = cov.graph, cov.N
    rep = ConstraintReport()
    name = g.name
    for tri in g.triangles():
        s = sum(cov.x_label[v] for v in tri)
        rep.add("x-triangle sums to -1", "->".join(map(name, tri)), (s + 1) % N == 0)
    for v in range(g.n):
        if g.x[v] == v:
            rep.add("x-loop 3a = -1", name(v), (3 * cov.x_label[v] + 1) % N == 0)
        if g.y[v] == v:
            rep.add("y-loop 2a = 1", name(v), (2 * cov.y_label[v] - 1) % N == 0)
        elif v < g.y[v]:
            w = g.y[v]
            rep.add("y-pair sums to 1", f"{name(v)}<->{name(w)}",
                    (cov.y_label[v] + cov.y_label[w] - 1) % N == 0)
    for arrow in sorted(cov.tree):
        rep.add("tree arrow is 0", f"{arrow[0]}:{name(arrow[1])}", cov.label(arrow) == 0)
    if not simply_intersecting_required:
        return rep
    if g.n > 1:
        for v in range(g.n):
            if g.x[v] == v or g.y[v] == v:
                for kind in ("xy", "yx"):
                    c = cycle_through(cov, v, kind)
                    rep.add(f"fixed-vertex {kind}-cycle label is 0", name(v),
                            cycle_label(cov, c, kind) == 0)
    if not pairs:
        return rep
    for v, w in _shared_cycle_pairs(g):
        lam = path_label(cov, v, w, "xy")
        mu = path_label(cov, v, w, "yx")
        rep.add("xy and yx path labels differ", f"{name(v)}->{name(w)}", lam != mu)
    return rep


def _shared_cycle_pairs(g: SchreierGraph) -> list:
    cx = {v: k for k, c in enumerate(xy_cycles(g)) for v in c}
    cy = {v: k for k, c in enumerate(yx_cycles(g)) for v in c}
    return [(v, w) for v in range(g.n) for w in range(g.n)
            if v != w and cx[v] == cx[w] and cy[v] == cy[w]]


# -- lifting ---------------------------------------------------------------


class LiftedSpace(BraidSpace):
    def __init__(self, cov: LabeledCovering):
        self.source = cov
        n, N = cov.graph.n, cov.N
        self.N = N
        self.points = [(v, i) for v in range(n) for i in range(N)]
        gx, gy = cov.graph.x, cov.graph.y
        self.g = [gx[v] * N + (i + cov.x_label[v]) % N for v, i in self.points]
        self.h = [gy[v] * N + (i + cov.y_label[v]) % N for v, i in self.points]
        self.sigma1 = compose(self.g, self.h)
        self.sigma2 = compose(self.h, self.g)
        self.base = 0

    def index(self, v: int, i: int) -> int:
        return v * self.N + i % self.N

    def fiber(self, v: int, residues=None) -> list:
        rs = range(self.N) if residues is None else residues
        return [self.index(v, i) for i in rs]

    def point_name(self, p: int) -> str:
        v, i = self.points[p]
        return f"{self.source.graph.name(v)}[{i}]"


def lift_covering(cov: LabeledCovering, check: bool = True) -> LiftedSpace:
    space = LiftedSpace(cov)
    if check:
        if not space.braid_relation_holds():
            raise InvariantError("braid relation fails on the lift")
        shift = [v * cov.N + (i + 1) % cov.N for v, i in space.points]
        if list(space.delta().perm) != shift:
            rep = check_constraints(cov, simply_intersecting_required=False)
            raise InvariantError(f"Δ is not the fiber shift; failing: {rep.failures()}")
    return space


# -- gauge changes ---------------------------------------------------------


def regauge(cov: LabeledCovering, shift: Sequence[int], tree=None) -> LabeledCovering:
    """Relabel fibers by (v, i) -> (v, i + shift[v])."""
    g, N = cov.graph, cov.N
    xl = [cov.x_label[v] + shift[g.x[v]] - shift[v] for v in range(g.n)]
    yl = [cov.y_label[v] + shift[g.y[v]] - shift[v] for v in range(g.n)]
    return LabeledCovering(g, N, xl, yl, cov.tree if tree is None else frozenset(tree))


def relabel_covering(cov: LabeledCovering, perm: Sequence[int]) -> LabeledCovering:
    """The same covering with vertex v renamed perm[v]."""
    g = relabel(cov.graph, perm)
    xl = [0] * g.n
    yl = [0] * g.n
    for v in range(g.n):
        xl[perm[v]] = cov.x_label[v]
        yl[perm[v]] = cov.y_label[v]
    tree = frozenset((k, perm[v]) for k, v in cov.tree)
    return LabeledCovering(g, cov.N, xl, yl, tree, cov.symbols)


def gauge_to_tree(cov: LabeledCovering, tree: Sequence[Arrow], root: int = 0) -> LabeledCovering:
    """Equivalent covering whose labels vanish on ``tree``."""
    g = cov.graph
    shift = [0] * g.n
    for u, w, arrow, fwd in _tree_walk(g, tree, root):
        l = cov.label(arrow)
        if fwd:  # arrow u -> w, new label l + s_w - s_u = 0
            shift[w] = shift[u] - l
        else:  # arrow w -> u
            shift[w] = shift[u] + l
    return regauge(cov, shift, tree)


# -- label templates -------------------------------------------------------

_TERM = re.compile(r"([+-]?)(\d*)\*?([a-z]\w*)?")


def parse_linear(expr: str) -> dict:
    """'1-b' -> {'': 1, 'b': -1}."""
    expr = expr.replace(" ", "").replace("−", "-")
    if not expr:
        raise InputError("empty label expression")
    out: Dict[str, int] = {}
    pos = 0
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse label {expr!r}")
        sign, num, sym = m.groups()
        sym = sym or ""
        if not num and not sym:
            raise InputError(f"cannot parse label {expr!r}")
        coef = (-1 if sign == "-" else 1) * (int(num) if num else 1)
        out[sym] = out.get(sym, 0) + coef
        pos = m.end()
    return {k: v for k, v in out.items() if v}


def eval_linear(expr: dict, values: dict) -> int:
    return sum(c * (values[s] if s else 1) for s, c in expr.items())


@dataclass
class LabelTemplate:
    """A graph with arrow labels written as linear expressions in symbols."""

    graph: SchreierGraph
    x_expr: list
    y_expr: list
    symbols: tuple
    zero_arrows: Optional[frozenset] = None

    @classmethod
    def from_strings(cls, graph: SchreierGraph, x_expr: Sequence[str], y_expr: Sequence[str]):
        xe = [parse_linear(e) for e in x_expr]
        ye = [parse_linear(e) if e else {} for e in y_expr]
        syms = sorted({s for e in xe + ye for s in e if s})
        return cls(graph, xe, ye, tuple(syms))

    def tree(self) -> frozenset:
        if self.zero_arrows is not None:
            return self.zero_arrows
        arrows = [("x", v) for v, e in enumerate(self.x_expr) if not e]
        arrows += [("y", v) for v, e in enumerate(self.y_expr) if not e]
        return frozenset(arrows)

    def instantiate(self, N: int, values: dict) -> LabeledCovering:
        xl = [eval_linear(e, values) for e in self.x_expr]
        yl = [eval_linear(e, values) for e in self.y_expr]
        return LabeledCovering(self.graph, N, xl, yl, self.tree(),
                               {k: values[k] % N for k in self.symbols})

    def fit(self, cov: LabeledCovering) -> Optional[dict]:
        """Symbol values reproducing ``cov`` after a gauge change, if any."""
        if cov.graph.x != self.graph.x or cov.graph.y != self.graph.y:
            return None
        tree = sorted(self.tree())
        root = self.graph.v0 or 0
        same = gauge_to_tree(cov, tree, root)
        N = cov.N
        for vals in product(range(N), repeat=len(self.symbols)):
            values = dict(zip(self.symbols, vals))
            trial = self.instantiate(N, values)
            if trial.x_label == same.x_label and trial.y_label == same.y_label:
                return values
        return None


# -- enumeration -----------------------------------------------------------


def _solve_loop(mult: int, rhs: int, N: int) -> Optional[int]:
    sols = [a for a in range(N) if (mult * a - rhs) % N == 0]
    return sols[0] if len(sols) == 1 else None


def generic_template(graph: SchreierGraph) -> LabelTemplate:
    """Parametrise all coverings of ``graph`` relative to its BFS spanning tree.

    Tree arrows get 0; in each triangle every non-tree arrow but the last is a
    free symbol and the last closes the sum to -1; each non-tree y-pair gets
    one symbol s and 1 - s on the way back; loops get their own symbol.
    """
    tree = set(spanning_tree(graph))
    n = graph.n
    x_expr: list = [None] * n
    y_expr: list = [None] * n
    syms: list = []

    def fresh():
        syms.append(f"s{len(syms)}")
        return syms[-1]

    for v in range(n):
        if graph.x[v] == v:
            x_expr[v] = {fresh(): 1}
    for tri in graph.triangles():
        open_arrows = [v for v in tri if ("x", v) not in tree]
        for v in tri:
            if ("x", v) in tree:
                x_expr[v] = {}
        closing = {"": -1}
        for v in open_arrows[:-1]:
            s = fresh()
            x_expr[v] = {s: 1}
            closing[s] = -1
        x_expr[open_arrows[-1]] = closing
    for v in range(n):
        w = graph.y[v]
        if w == v:
            y_expr[v] = {fresh(): 1}
        elif ("y", v) in tree:
            y_expr[v], y_expr[w] = {}, {"": 1}
        elif ("y", w) in tree or v > w:
            continue
        else:
            s = fresh()
            y_expr[v], y_expr[w] = {s: 1}, {"": 1, s: -1}
    return LabelTemplate(graph, x_expr, y_expr, tuple(syms), frozenset(tree))


def _loop_symbols(template: LabelTemplate) -> dict:
    """Symbols that are exactly the label of an x-loop (3a = -1) or y-loop (2a = 1)."""
    g = template.graph
    out = {}
    for v in range(g.n):
        for kind, perm, expr, rule in (("x", g.x, template.x_expr, (3, -1)),
                                       ("y", g.y, template.y_expr, (2, 1))):
            e = expr[v]
            if perm[v] == v and len(e) == 1:
                (sym, coef), = e.items()
                if sym and coef == 1:
                    out[sym] = rule
    return out


def enumerate_coverings(graph: SchreierGraph, N_max: int, template: Optional[LabelTemplate] = None,
                        prefilter: bool = True, N_min: int = 1,
                        require: str = "simply-intersecting") -> List[LabeledCovering]:
    """All coverings with fiber size N <= N_max whose lift is simply intersecting.

    ``require`` relaxes the filter: "fixed-cycles" keeps coverings meeting
    the label sums and the fixed-vertex cycle conditions, "labels" only the
    label sums.  Neither relaxed level builds a lift.

    With a template its symbols are enumerated; otherwise the BFS-tree
    parametrisation of ``generic_template`` is used.  Loop labels are solved
    outright.  The prefilter applies the necessary cycle-label conditions
    before paying for a lift; switching it off must not change the result.
    """
    if require not in ("simply-intersecting", "fixed-cycles", "labels"):
        raise InputError(f"unknown requirement {require!r}")
    if not graph.is_connected():
        raise InputError("graph is not connected")
    template = generic_template(graph) if template is None else template
    loops = _loop_symbols(template)
    found = []
    for N in range(N_min, N_max + 1):
        fixed = {}
        for sym, (mult, rhs) in loops.items():
            fixed[sym] = _solve_loop(mult, rhs, N)
        if any(v is None for v in fixed.values()):
            continue
        free = [s for s in template.symbols if s not in fixed]
        for vals in product(range(N), repeat=len(free)):
            values = dict(fixed)
            values.update(zip(free, vals))
            cov = template.instantiate(N, values)
            if require == "labels":
                if check_constraints(cov, False).passed:
                    found.append(cov)
                continue
            if require == "fixed-cycles":
                if check_constraints(cov, True, pairs=False).passed:
                    found.append(cov)
                continue
            if not check_constraints(cov, prefilter).passed:
                continue
            if is_simply_intersecting(lift_covering(cov, check=False))[0]:
                found.append(cov)
    return found
