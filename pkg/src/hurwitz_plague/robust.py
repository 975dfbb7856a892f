"""Robust subgraph chains, fragments, Span graphs and the built-in graphs.

Vertices of the built-in graphs follow the printed numbering: vertex k is
``v{k+1}``, and v1 (index 0) carries the x-loop and is the base point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Sequence

from .automaton import (AutomatonRule, SubsetState, closure_mask, is_plague, orbit_rule,
                        from_mask, rule_from_triples, to_mask)
from .coverings import (LabeledCovering, LabelTemplate, LiftedSpace, lift_covering,
                        regauge, relabel_covering)
from .metrics import greedy_plague, weight_report
from .orbits import InvariantError, is_simply_intersecting
from .racks import InputError
from .schreier import SchreierGraph, classify_fixed, find_isomorphism, signature

# -- built-in graphs --------------------------------------------------------


def _template(n: int, x_arrows: dict, y_arrows: dict) -> LabelTemplate:
    """Arrows keyed by 1-based source: {v: (target, label expression)}."""
    x = list(range(n))
    y = list(range(n))
    xe = ["0"] * n
    ye = ["0"] * n
    for v, (w, lab) in x_arrows.items():
        x[v - 1] = w - 1
        xe[v - 1] = lab
    for v, (w, lab) in y_arrows.items():
        y[v - 1] = w - 1
        ye[v - 1] = lab
    return LabelTemplate.from_strings(SchreierGraph(x, y, v0=0), xe, ye)


def template_G7_52() -> LabelTemplate:
    return _template(
        7,
        {1: (1, "a"), 2: (3, "-1"), 3: (4, "0"), 4: (2, "0"),
         5: (6, "-1"), 6: (7, "0"), 7: (5, "0")},
        {1: (2, "1"), 2: (1, "0"), 4: (5, "1"), 5: (4, "0"),
         3: (6, "c"), 6: (3, "1-c"), 7: (7, "b")},
    )


def template_G10_10() -> LabelTemplate:
    return _template(
        10,
        {1: (1, "a"), 2: (3, "-1"), 3: (4, "0"), 4: (2, "0"),
         8: (10, "-1"), 10: (9, "0"), 9: (8, "0"),
         7: (5, "-1"), 5: (6, "0"), 6: (7, "0")},
        {1: (2, "1"), 2: (1, "0"), 10: (3, "b"), 3: (10, "1-b"),
         4: (5, "0"), 5: (4, "1"), 7: (8, "c"), 8: (7, "1-c"),
         6: (9, "0"), 9: (6, "1")},
    )


def template_G10_532() -> LabelTemplate:
    return _template(
        10,
        {1: (1, "a"), 2: (3, "-1"), 3: (4, "0"), 4: (2, "0"),
         10: (8, "-1"), 8: (9, "0"), 9: (10, "0"),
         6: (7, "-1"), 7: (5, "0"), 5: (6, "0")},
        {1: (2, "1"), 2: (1, "0"), 10: (3, "b"), 3: (10, "1-b"),
         4: (5, "0"), 5: (4, "1"), 7: (8, "c"), 8: (7, "1-c"),
         6: (9, "0"), 9: (6, "1")},
    )


def template_S3_orbit() -> LabelTemplate:
    """The 4-vertex quotient of the size-8 S3 orbit with its two symbols."""
    return _template(
        4,
        {1: (1, "a"), 2: (3, "-1"), 3: (4, "0"), 4: (2, "0")},
        {1: (2, "1"), 2: (1, "0"), 3: (4, "b"), 4: (3, "1-b")},
    )


BUILTIN_TEMPLATES = {
    "G7_52": template_G7_52,
    "G10_10": template_G10_10,
    "G10_532": template_G10_532,
    "S3_8": template_S3_orbit,
}


def builtin_template(name: str) -> LabelTemplate:
    try:
        return BUILTIN_TEMPLATES[name]()
    except KeyError:
        raise InputError(f"unknown built-in graph {name!r}; "
                         f"choose from {', '.join(BUILTIN_TEMPLATES)}") from None


def builtin_graph(name: str) -> SchreierGraph:
    return builtin_template(name).graph


# -- fragments and Span graphs --------------------------------------------

# Fragments in the numbering of their source graph; vertex 2 is the site
# that gets identified with an open vertex of the chain.
FRAGMENTS = {
    "F1": {"x": [(2, 3, 4), (8, 10, 9), (7, 5, 6)], "y": [(3, 10), (4, 5), (7, 8), (6, 9)]},
    "F2": {"x": [(2, 3, 4), (10, 8, 9), (7, 5, 6)], "y": [(3, 10), (4, 5), (7, 8), (6, 9)]},
    "F3": {"x": [(2, 3, 4), (5, 6, 7)], "y": [(3, 6), (4, 5), (7, 7)]},
    "F4": {"x": [(2, 3, 4), (5, 7, 6)], "y": [(3, 6), (4, 5), (7, 7)]},
    # not one of the printed fragments: caps the open vertex with an x-loop
    "X": {"x": [(2,)], "y": []},
}


def fragment_size(kind: str) -> int:
    frag = FRAGMENTS[kind]
    verts = {v for c in frag["x"] for v in c} | {v for p in frag["y"] for v in p}
    return len(verts - {2})


def span_graph(k: int, fragments: Sequence[str]) -> SchreierGraph:
    """Chain H_0 ≺2 … ≺2 H_k with one fragment glued at each open vertex."""
    fragments = list(fragments)
    if k < 0 or len(fragments) != k + 1:
        raise InputError(f"need exactly k+1 = {k + 1} fragments, got {len(fragments)}")
    unknown = [f for f in fragments if f not in FRAGMENTS]
    if unknown:
        raise InputError(f"unknown fragment kinds {unknown}")
    if sum(f in ("F3", "F4") for f in fragments) > 1:
        raise InputError("at most one fragment with a y-loop (F3 or F4)")
    x: List[int] = [0, 1]
    y: List[int] = [1, 0]
    sites = deque([1])

    def new_vertex():
        x.append(len(x))
        y.append(len(y))
        return len(x) - 1

    for _ in range(k):
        u = sites.popleft()
        a, b = new_vertex(), new_vertex()
        x[u], x[a], x[b] = a, b, u
        for w in (a, b):
            p = new_vertex()
            y[w], y[p] = p, w
            sites.append(p)
    for kind in fragments:
        u = sites.popleft()
        frag = FRAGMENTS[kind]
        local: Dict[int, int] = {2: u}
        for c in frag["x"]:
            for v in c:
                if v not in local:
                    local[v] = new_vertex()
        for p in frag["y"]:
            for v in p:
                if v not in local:
                    local[v] = new_vertex()
        for c in frag["x"]:
            for i, v in enumerate(c):
                x[local[v]] = local[c[(i + 1) % len(c)]]
        for v, w in frag["y"]:
            y[local[v]], y[local[w]] = local[w], local[v]
    return SchreierGraph(x, y, v0=0)


# -- robust chains ----------------------------------------------------------


@dataclass
class RobustChain:
    graph: SchreierGraph
    v0: int
    vertices: List[list]  # vertices of H_j in insertion order
    triangles: List[list]  # triangles (as vertex tuples) of H_j
    m: List[int]  # m[j-1] = e(H_j) - e(H_{j-1})
    v_of_k: Dict[int, int] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.vertices) - 1

    @property
    def K(self) -> List[int]:
        return [j for j in range(1, self.t + 1) if self.m[j - 1] == 2]

    @property
    def sizes(self) -> List[int]:
        return [len(v) for v in self.vertices]

    def new_vertices(self, k: int) -> list:
        prev = set(self.vertices[k - 1])
        return [v for v in self.vertices[k] if v not in prev]

    def profile(self) -> str:
        return "H_0 " + " ".join(f"<{m} H_{j + 1}" for j, m in enumerate(self.m))


def y_edge_count(graph: SchreierGraph, verts) -> int:
    vs = set(verts)
    return len({frozenset((v, graph.y[v])) for v in vs})


def check_robust(graph: SchreierGraph, verts, triangles, v0: int) -> List[str]:
    """Problems with (verts, triangles) as a robust subgraph; empty means fine."""
    vs = set(verts)
    problems = []
    if v0 not in vs:
        problems.append("missing the base point")
    tri_verts = {v for t in triangles for v in t}
    if not tri_verts <= vs:
        problems.append("triangle leaves the subgraph")
    for t in triangles:
        if len(t) != 3 or graph.x[t[0]] != t[1] or graph.x[t[1]] != t[2] or graph.x[t[2]] != t[0]:
            problems.append(f"{t} is not an x-triangle")
    for v in vs:
        if graph.y[v] not in vs:
            problems.append(f"{graph.name(v)} lacks its y-edge")
    # connectivity through triangle edges and y-edges
    adj = {v: set() for v in vs}
    for t in triangles:
        for a in t:
            adj[a].update(t)
    for v in vs:
        adj[v].add(graph.y[v])
    seen, todo = {v0}, [v0]
    while todo:
        v = todo.pop()
        for w in adj.get(v, ()):
            if w in vs and w not in seen:
                seen.add(w)
                todo.append(w)
    if seen != vs:
        problems.append("not connected")
    return problems


def robust_chain(graph: SchreierGraph, v0: Optional[int] = None) -> RobustChain:
    """Greedy chain: triangles are added in the order their vertices entered."""
    v0 = (graph.v0 if graph.v0 is not None else 0) if v0 is None else v0
    if graph.x[v0] != v0:
        raise InputError(f"base point {graph.name(v0)} has no x-loop")
    order = [v0] if graph.y[v0] == v0 else [v0, graph.y[v0]]
    inside = set(order)
    tris: list = []
    tri_seen = set()
    chain_v = [list(order)]
    chain_t = [[]]
    ms = []
    pos = 0
    while pos < len(order):
        u = order[pos]
        pos += 1
        if graph.x[u] == u:
            continue
        tri = (u, graph.x[u], graph.x[graph.x[u]])
        key = frozenset(tri)
        if key in tri_seen:
            continue
        tri_seen.add(key)
        before = y_edge_count(graph, inside)
        for w in tri[1:]:
            if w not in inside:
                inside.add(w)
                order.append(w)
        for w in tri:
            p = graph.y[w]
            if p not in inside:
                inside.add(p)
                order.append(p)
        tris.append(tri)
        chain_v.append(list(order))
        chain_t.append(list(tris))
        ms.append(y_edge_count(graph, inside) - before)
    if len(inside) != graph.n:
        raise InputError("graph is not connected")
    chain = RobustChain(graph, v0, chain_v, chain_t, ms)
    chain.v_of_k = {k: chain.new_vertices(k)[0] for k in chain.K}
    return chain


# -- restricted automata and the P_K plague ---------------------------------


def sublift_rule(space: LiftedSpace, graph: SchreierGraph, verts, triangles):
    """Automaton on the points over ``verts``, using only pivots inside H.

    The triple (p, σ2 p, σ1σ2 p) sits over x⁻¹w, y w, x w where w = x(π p);
    it is kept when w carries an x-loop or its triangle belongs to H.
    Returns (rule, list of global point indices in local order).
    """
    vs = set(verts)
    tri_verts = {v for t in triangles for v in t}
    pts = [p for p in range(space.size) if space.points[p][0] in vs]
    local = {p: i for i, p in enumerate(pts)}
    s1, s2 = space.sigma1, space.sigma2
    triples = []
    for p in pts:
        w = graph.x[space.points[p][0]]
        if w not in vs or not (graph.x[w] == w or w in tri_verts):
            continue
        t = (p, s2[p], s1[s2[p]])
        triples.append(tuple(local[q] for q in t))
    return rule_from_triples(len(pts), triples, kind="sublift"), pts


def fiber_set(space: LiftedSpace, spec) -> list:
    """Points for [(vertex, residues or None for the whole fiber), ...]."""
    out = []
    for v, res in spec:
        out.extend(space.fiber(v, res))
    return sorted(set(out))


def spreads_on(rule: AutomatonRule, pts: list, chosen) -> bool:
    local = {p: i for i, p in enumerate(pts)}
    mask = to_mask(local[p] for p in chosen if p in local)
    return closure_mask(rule, mask) == rule.full


@dataclass
class PKReport:
    state: SubsetState
    per_level: List[bool]
    choice: Dict[int, int]
    verified: bool

    @property
    def plague(self) -> list:
        return self.state.indices()


def pk_plague(chain: RobustChain, cov: LabeledCovering, choice: Optional[Dict[int, int]] = None,
              space: Optional[LiftedSpace] = None, strict: bool = True) -> PKReport:
    """v0[*] ∪ {v(k)[*] : k in K}, checked on every restricted lift Σ_{H_j}.

    On Σ_{H_j} only the v(k) with k <= j are used.  ``strict`` turns a
    failed level into an InvariantError.
    """
    space = lift_covering(cov) if space is None else space
    choice = dict(chain.v_of_k if choice is None else choice)
    spec = [(chain.v0, None)] + [(choice[k], None) for k in chain.K]
    plague = fiber_set(space, spec)
    ok = []
    for j in range(1, chain.t + 1):
        rule, pts = sublift_rule(space, chain.graph, chain.vertices[j], chain.triangles[j])
        seeds = fiber_set(space, [(chain.v0, None)] + [(choice[k], None) for k in chain.K if k <= j])
        ok.append(spreads_on(rule, pts, seeds))
    if chain.t == 0:
        ok.append(spreads_on(orbit_rule(space), list(range(space.size)), plague))
    report = PKReport(SubsetState.of(space.size, plague), ok, choice, all(ok))
    if strict and not report.verified:
        bad = [j + 1 for j, good in enumerate(ok) if not good]
        raise InvariantError(f"v0[*] ∪ P_K is not a plague on the sub-lifts H_{bad} "
                             f"of {cov.name()}")
    return report


def pk_choices(chain: RobustChain, cov: LabeledCovering, limit: int = 256) -> dict:
    """For every k in K, the candidates v(k) that verify while the others stay at default."""
    space = lift_covering(cov)
    out = {}
    for k in chain.K:
        good = []
        for cand in chain.new_vertices(k):
            choice = dict(chain.v_of_k)
            choice[k] = cand
            if pk_plague(chain, cov, choice, space, strict=False).verified:
                good.append(cand)
        out[k] = good
    combos = list(product(*[chain.new_vertices(k) for k in chain.K]))
    verified = None
    if len(combos) <= limit:
        verified = sum(pk_plague(chain, cov, dict(zip(chain.K, c)), space, strict=False).verified
                       for c in combos)
    return {"per_k": out, "combinations": len(combos), "verified_combinations": verified}


def residue_reps(label: int, N: int) -> list:
    """{0, …, g-1} with g = gcd(label, N): representatives of Z_N/<label>."""
    return list(range(gcd(label % N, N) or N))


def v_fixed_summary(graph: SchreierGraph) -> dict:
    fs = classify_fixed(graph)
    return {"V_x": fs.V_x, "V_y": fs.V_y, "V_xy": fs.V_xy}


# -- lemma instance checks --------------------------------------------------


@dataclass
class PlagueCheck:
    label: str  # e.g. "v1[*] ∪ v3[*] ∪ v9[0]"
    size: int
    ratio: Fraction
    verified: bool
    bound: Optional[Fraction] = None
    bound_holds: Optional[bool] = None
    note: str = ""

    def to_json(self) -> dict:
        return {"plague": self.label, "size": self.size, "ratio": str(self.ratio),
                "verified": self.verified,
                "bound": None if self.bound is None else str(self.bound),
                "bound_holds": self.bound_holds, "note": self.note}


def _spec_text(graph: SchreierGraph, spec) -> str:
    parts = []
    for v, res in spec:
        if res is None:
            parts.append(f"{graph.name(v)}[*]")
        else:
            parts.append(f"{graph.name(v)}[{','.join(map(str, res))}]")
    return " ∪ ".join(parts)


def check_plague(cov: LabeledCovering, spec, bound=None, note="", space=None) -> PlagueCheck:
    space = lift_covering(cov) if space is None else space
    pts = fiber_set(space, spec)
    ratio = Fraction(len(pts), space.size)
    ok = is_plague(orbit_rule(space), pts)
    holds = None if bound is None else (ok and ratio <= bound)
    return PlagueCheck(_spec_text(cov.graph, spec), len(pts), ratio, ok, bound, holds, note)


def g10_532_case(b: int, c: int, N: int) -> str:
    return {(True, True): "b=c=0", (True, False): "b=0,c!=0",
            (False, True): "b!=0,c=0", (False, False): "b!=0,c!=0"}[(b % N == 0, c % N == 0)]


# weight per case as recomputed from the cycle structure; the printed case
# list has the two middle entries the other way round
G10_532_WEIGHTS = {"b=c=0": Fraction(3, 10), "b=0,c!=0": Fraction(11, 40),
                   "b!=0,c=0": Fraction(17, 60), "b!=0,c!=0": Fraction(1, 4)}


def lemma_plagues(name: str, cov: LabeledCovering, values: dict) -> List[PlagueCheck]:
    """The plagues the lemmas write down for a built-in graph, in its numbering."""
    N = cov.N
    space = lift_covering(cov)
    if name == "G7_52":
        return [check_plague(cov, [(0, None), (2, None)], Fraction(2, 7), space=space)]
    if name == "G10_10":
        return [check_plague(cov, [(0, None), (2, None), (8, [0])],
                             Fraction(2 * N + 1, 10 * N), space=space)]
    if name == "G10_532":
        b, c = values["b"] % N, values["c"] % N
        out = []
        if b == 0 and c == 0:
            out.append(check_plague(cov, [(0, None), (2, None), (5, None)], Fraction(3, 10),
                                    space=space))
        if b:
            reps = residue_reps(b, N)
            out.append(check_plague(cov, [(0, None), (7, None), (2, reps)],
                                    Fraction(2 * N + len(reps), 10 * N), "I = Z_N/<b>", space))
        if c:
            reps = residue_reps(c, N)
            out.append(check_plague(cov, [(0, None), (2, None), (7, reps)],
                                    Fraction(2 * N + len(reps), 10 * N), "I = Z_N/<c>", space))
        return out
    return []


def match_builtin(cov: LabeledCovering, names: Sequence[str] = ("G7_52", "G10_10", "G10_532")):
    """(name, covering in the built-in numbering and gauge, symbol values) or None.

    A graph without a base point is tried from each of its x-loops.
    """
    g = cov.graph
    starts = [g.v0] if g.v0 is not None else classify_fixed(g).V_x
    for name in names:
        t = builtin_template(name)
        for v0 in starts:
            f = find_isomorphism(SchreierGraph(g.x, g.y, v0=v0), t.graph, respect_point=True)
            if f is None:
                continue
            values = t.fit(relabel_covering(cov, f))
            if values is not None:
                return name, t.instantiate(cov.N, values), values
    return None


def _divisors(N: int) -> list:
    return [d for d in range(1, N) if N % d == 0]


def reduce_plague(cov: LabeledCovering, chain: RobustChain, space=None) -> tuple:
    """Shrink v0[*] ∪ P_K fiber by fiber while it stays a plague.

    For each k in K (last first) the fiber v(k)[*] is replaced by one point
    after gauging the y-label at v(k) to 0, else by v(k)[0..d-1] for the
    smallest divisor d of N that still works.  Returns (covering, spec, log).
    """
    N, g = cov.N, cov.graph
    spec = {chain.v0: None}
    for k in chain.K:
        spec[chain.v_of_k[k]] = None
    log = []
    for k in reversed(chain.K):
        v = chain.v_of_k[k]
        trial_cov = cov
        if g.y[v] != v and cov.y_label[g.y[v]] != 0:
            shift = [0] * g.n
            shift[v] = -cov.y_label[g.y[v]]
            trial_cov = regauge(cov, shift, tree=frozenset())
        trial_space = lift_covering(trial_cov)
        rule = orbit_rule(trial_space)
        for d in _divisors(N):
            trial = dict(spec)
            trial[v] = list(range(d))
            if is_plague(rule, fiber_set(trial_space, list(trial.items()))):
                cov, spec = trial_cov, trial
                log.append(f"{g.name(v)}[*] -> {g.name(v)}[0..{d - 1}]")
                break
        else:
            log.append(f"{g.name(v)}[*] kept")
    return cov, list(spec.items()), log


@dataclass
class Section5Report:
    graph: str
    N: int
    fixed: dict
    case: str
    chain: str
    K: list
    has_step1: bool
    weight: Fraction
    checks: List[PlagueCheck] = field(default_factory=list)
    builtin: Optional[str] = None
    symbols: Optional[dict] = None
    notes: List[str] = field(default_factory=list)
    simply_intersecting: Optional[bool] = None

    @property
    def passed(self) -> bool:
        verified = [c for c in self.checks if c.verified]
        return bool(verified) and all(c.verified for c in self.checks) and \
            any(c.ratio <= self.weight for c in verified)

    def to_json(self) -> dict:
        return {"graph": self.graph, "N": self.N, "fixed": self.fixed, "case": self.case,
                "chain": self.chain, "K": self.K, "has_step1": self.has_step1,
                "weight": str(self.weight), "builtin": self.builtin, "symbols": self.symbols,
                "simply_intersecting": self.simply_intersecting,
                "checks": [c.to_json() for c in self.checks], "notes": self.notes,
                "passed": self.passed}


def classify_case(graph: SchreierGraph) -> str:
    fs = classify_fixed(graph)
    if not fs.V_x:
        return "V_x empty (unsupported)"
    if fs.V_xy:
        return "V_xy nonempty (no dedicated lemma)"
    if not fs.V_y:
        return "Case 1: V_y = V_xy = ∅"
    return f"Case 2: V_y ≠ ∅ = V_xy (|V_y| = {len(fs.V_y)})"


def verify_section5(cov: LabeledCovering, chain: Optional[RobustChain] = None) -> Section5Report:
    """Classify the instance, build the lemma plagues and check them by closure."""
    g = cov.graph
    fs = classify_fixed(g)
    space = lift_covering(cov)
    si = is_simply_intersecting(space)[0]
    wrep = weight_report(cov)
    case = classify_case(g)
    if not fs.V_x:
        return Section5Report(signature(g), cov.N, v_fixed_summary(g), case, "", [], False,
                              wrep.weight, notes=["no x-loop: outside the robust-chain setting"],
                              simply_intersecting=si)
    if chain is None:
        v0 = g.v0 if g.v0 is not None and g.v0 in fs.V_x else fs.V_x[0]
        chain = robust_chain(g, v0)
    rep = Section5Report(signature(g), cov.N, v_fixed_summary(g), case, chain.profile(),
                         chain.K, 1 in chain.m, wrep.weight, simply_intersecting=si)
    if not si:
        rep.notes.append("lift is not simply intersecting; lemma hypotheses fail, "
                         "plagues are still checked")
    if rep.has_step1 and not fs.V_y:
        rep.notes.append("chain has a <1 step: the bound 1/4 applies")
    pk = pk_plague(chain, cov, space=space, strict=False)
    spec = [(chain.v0, None)] + [(chain.v_of_k[k], None) for k in chain.K]
    pk_check = check_plague(cov, spec, note="v0[*] ∪ P_K", space=space)
    if not pk.verified:
        pk_check.note += f"; fails on sub-lifts {[j + 1 for j, ok in enumerate(pk.per_level) if not ok]}"
    if not fs.V_xy:
        rep.checks.append(pk_check)
    hit = match_builtin(cov)
    if hit is not None:
        name, normal, values = hit
        rep.builtin, rep.symbols = name, dict(values)
        rep.checks.extend(lemma_plagues(name, normal, values))
        if name == "G10_532":
            which = g10_532_case(values["b"], values["c"], cov.N)
            expected = G10_532_WEIGHTS[which]
            rep.notes.append(f"weight case {which}: expected {expected}, got {wrep.weight}"
                             " (case split read by b, c mod N; printed list swaps the middle two)")
            if expected != wrep.weight:
                rep.notes.append("WEIGHT MISMATCH")
    elif chain.K:
        reduced_cov, spec, log = reduce_plague(cov, chain)
        bound = Fraction(1, 4) if not fs.V_y and not fs.V_xy else None
        chk = check_plague(reduced_cov, spec, bound, "reduced: " + "; ".join(log))
        rep.checks.append(chk)
    if not any(c.verified and c.ratio <= rep.weight for c in rep.checks):
        rule = orbit_rule(space)
        pts = from_mask(greedy_plague(rule))
        label = " ∪ ".join(space.point_name(p) for p in pts)
        rep.checks.append(PlagueCheck(label, len(pts), Fraction(len(pts), space.size),
                                      is_plague(rule, pts), note="greedy"))
    if wrep.special:
        rep.notes.append(f"special case {wrep.special} ({wrep.note})")
    return rep
