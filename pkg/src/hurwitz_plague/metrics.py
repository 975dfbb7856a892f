"""Minimal plagues, immunity, weight and the imm <= ω comparison.

All ratios are ``fractions.Fraction``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Callable, List, Optional, Sequence

from .automaton import (AutomatonRule, SubsetState, closure_by_iteration, closure_mask,
                        from_mask, orbit_rule, popcount, to_mask)
from .coverings import (LabeledCovering, cycle_label, lift_covering, sigma_cycle_lengths)
from .orbits import BraidSpace, centralizer, cycle_length_pairs
from .racks import InputError
from .schreier import classify_fixed, signature, xy_cycles

DEFAULT_SEARCH_CAP = 30
ORACLE_CAP = 24
DEFAULT_NODE_BUDGET = 2_000_000

_F = Fraction
OMEGA_PRIME = (
    (_F(1), _F(1, 3), _F(11, 24), _F(1, 2), _F(1, 2)),
    (_F(1, 3), _F(1, 3), _F(1, 3), _F(1, 3), _F(1, 3)),
    (_F(11, 24), _F(1, 3), _F(7, 24), _F(7, 24), _F(7, 24)),
    (_F(1, 2), _F(1, 3), _F(7, 24), _F(1, 4), _F(1, 4)),
    (_F(1, 2), _F(1, 3), _F(7, 24), _F(1, 4), _F(1, 4)),
)


def search_cap() -> int:
    raw = os.environ.get("HURWITZ_SEARCH_CAP")
    if raw is None:
        return DEFAULT_SEARCH_CAP
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"HURWITZ_SEARCH_CAP={raw!r} is not an integer") from None


@dataclass
class PlagueResult:
    witness: SubsetState
    size: int
    certified_minimal: bool
    search_stats: dict = field(default_factory=dict)


# -- oracle ----------------------------------------------------------------


def exhaustive_oracle(rule: AutomatonRule, k_max: Optional[int] = None):
    """Smallest plague size up to k_max by plain enumeration, else None."""
    n = rule.size
    if n > ORACLE_CAP:
        raise InputError(f"oracle limited to {ORACLE_CAP} points, got {n}")
    k_max = n if k_max is None else k_max
    full = (1 << n) - 1
    for k in range(1, k_max + 1):
        for subset in combinations(range(n), k):
            if closure_by_iteration(rule, to_mask(subset)) == full:
                return k
    return None


# -- pruned search ---------------------------------------------------------


class _MaskMapper:
    """Apply a point permutation to bitmasks via per-byte lookup tables."""

    def __init__(self, perm: Sequence[int]):
        n = len(perm)
        self.tables = []
        for b in range(0, n, 8):
            table = []
            for byte in range(256):
                m = 0
                for k in range(8):
                    if byte >> k & 1 and b + k < n:
                        m |= 1 << perm[b + k]
                table.append(m)
            self.tables.append(table)

    def __call__(self, mask: int) -> int:
        out = 0
        for table in self.tables:
            out |= table[mask & 255]
            mask >>= 8
        return out


def greedy_plague(rule: AutomatonRule) -> int:
    """A plague built by always adding the point whose closure grows most."""
    mask = closure_mask(rule, 0)
    chosen = 0
    while mask != rule.full:
        best, best_c = None, -1
        for p in range(rule.size):
            if mask >> p & 1:
                continue
            c = popcount(closure_mask(rule, mask | 1 << p, mask))
            if c > best_c:
                best, best_c = p, c
        chosen |= 1 << best
        mask = closure_mask(rule, mask | 1 << best, mask)
    return chosen


def minimal_plague(rule: AutomatonRule, symmetries: Optional[List[Sequence[int]]] = None,
                   cap: Optional[int] = None, node_budget: int = DEFAULT_NODE_BUDGET) -> PlagueResult:
    """Exact minimum plague by breadth-first search over closed sets.

    Level k holds every distinct closed set generated by k points (up to the
    given symmetries).  Extending a closed set by one point and closing again
    reaches level k+1; the first level containing the full set is the
    answer, and exhausting the previous levels certifies it.
    """
    n = rule.size
    if n == 0:
        raise InputError("empty ground set")
    cap = search_cap() if cap is None else cap
    stats = {"closures": 0, "levels": [], "symmetries": len(symmetries or [])}
    if n > cap:
        w = greedy_plague(rule)
        stats["reason"] = f"{n} points exceed the certification cap {cap}"
        return PlagueResult(SubsetState(n, w), popcount(w), False, stats)
    mappers = [_MaskMapper(p) for p in symmetries or [] if list(p) != list(range(n))]

    def canon(mask: int) -> int:
        best = mask
        for f in mappers:
            m = f(mask)
            if m < best:
                best = m
        return best

    start = closure_mask(rule, 0)
    if start == rule.full:
        return PlagueResult(SubsetState(n, 0), 0, True, stats)
    level = {canon(start): (start, 0)}  # canonical closed set -> (closed set, generators)
    k = 0
    while True:
        k += 1
        nxt = {}
        for closed, gens in level.values():
            for p in range(n):
                if closed >> p & 1:
                    continue
                stats["closures"] += 1
                if stats["closures"] > node_budget:
                    w = greedy_plague(rule)
                    stats["reason"] = "node budget exhausted"
                    return PlagueResult(SubsetState(n, w), popcount(w), popcount(w) <= k, stats)
                c = closure_mask(rule, closed | 1 << p, closed)
                if c == rule.full:
                    stats["levels"].append(len(level))
                    g = gens | 1 << p
                    return PlagueResult(SubsetState(n, g), k, True, stats)
                key = canon(c)
                if key not in nxt:
                    nxt[key] = (c, gens | 1 << p)
        stats["levels"].append(len(level))
        level = nxt


def minimal_plague_of_space(space: BraidSpace, **kw) -> PlagueResult:
    return minimal_plague(orbit_rule(space), symmetries=centralizer(space), **kw)


def immunity(result: PlagueResult, ground_size: int) -> Fraction:
    if not result.certified_minimal:
        raise InputError("minimum plague not certified; immunity is unknown")
    return Fraction(result.size, ground_size)


# -- weight ----------------------------------------------------------------


def omega_prime(i: int, j: int) -> Fraction:
    if i < 1 or j < 1:
        raise InputError("cycle lengths start at 1")
    return OMEGA_PRIME[min(i, 5) - 1][min(j, 5) - 1]


@dataclass
class SpecialCase:
    """A covering whose weight gets a bonus on designated fibers."""

    name: str
    n_vertices: int
    N: int
    designated: Callable  # covering -> list of vertices
    bonus: Fraction
    expected_base: Fraction
    signature: Optional[str] = None
    note: str = "unverified against the source catalogue"

    def matches(self, cov: LabeledCovering) -> bool:
        if cov.graph.n != self.n_vertices or cov.N != self.N:
            return False
        if self.signature and signature(cov.graph) != self.signature:
            return False
        verts = self.designated(cov)
        return bool(verts) and all(
            omega_prime(*sigma_cycle_lengths(cov, v)) == self.expected_base for v in verts)


def _x_fixed(cov):
    return classify_fixed(cov.graph).V_x


def _after_x_fixed(cov):
    g = cov.graph
    return [g.x[g.y[v]] for v in classify_fixed(g).V_x]


def _every_vertex(cov):
    return list(range(cov.graph.n))


ROLES = {"x-fixed": _x_fixed, "after-x-fixed": _after_x_fixed, "all": _every_vertex}


def load_registry(entries: Optional[list] = None) -> tuple:
    """Special cases from JSON-style entries; the shipped registry.json by default."""
    if entries is None:
        text = resources.files(__package__).joinpath("registry.json").read_text()
        entries = json.loads(text)
    out = []
    for e in entries:
        try:
            out.append(SpecialCase(e["name"], int(e["vertices"]), int(e["N"]), ROLES[e["designated"]],
                                   Fraction(e["bonus"]), Fraction(e["base"]), e.get("signature"),
                                   e.get("note", "unverified against the source catalogue")))
        except (KeyError, ValueError) as exc:
            raise InputError(f"bad registry entry {e!r}: {exc}") from None
    return tuple(out)


DEFAULT_REGISTRY = load_registry()


@dataclass
class WeightReport:
    weight: Fraction
    special: Optional[str] = None
    note: str = ""


def weight_report(cov: LabeledCovering, registry=DEFAULT_REGISTRY) -> WeightReport:
    n, N = cov.graph.n, cov.N
    per_vertex = [omega_prime(*sigma_cycle_lengths(cov, v)) for v in range(n)]
    hit = next((case for case in registry if case.matches(cov)), None)
    if hit is not None:
        for v in hit.designated(cov):
            per_vertex[v] += hit.bonus
    total = sum(per_vertex, Fraction(0)) * N
    return WeightReport(total / (n * N), hit.name if hit else None, hit.note if hit else "")


def weight(cov: LabeledCovering, registry=DEFAULT_REGISTRY) -> Fraction:
    return weight_report(cov, registry).weight


def weight_of_space(space: BraidSpace) -> Fraction:
    """Weight read straight off the σ-cycles (no special cases)."""
    total = sum((omega_prime(i, j) for i, j in cycle_length_pairs(space)), Fraction(0))
    return total / space.size


def cycle_label_multiset(cov: LabeledCovering) -> list:
    return sorted(cycle_label(cov, c, "xy") for c in xy_cycles(cov.graph))


# -- conjecture check ------------------------------------------------------


@dataclass
class ConjectureResult:
    imm: Optional[Fraction]
    bound: Fraction
    omega: Fraction
    verdict: str  # holds | fails | inconclusive
    witness: list
    certified: bool
    special: Optional[str] = None


def check_conjecture(cov: LabeledCovering, plague_hint: Optional[Sequence[int]] = None,
                     cap: Optional[int] = None, registry=DEFAULT_REGISTRY) -> ConjectureResult:
    """Compare immunity (or a verified upper bound) with the weight."""
    space = lift_covering(cov)
    rule = orbit_rule(space)
    wrep = weight_report(cov, registry)
    res = minimal_plague(rule, symmetries=centralizer(space), cap=cap)
    witness = res.witness.indices()
    size = res.size
    if plague_hint is not None:
        hint = to_mask(plague_hint)
        if closure_mask(rule, hint) != rule.full:
            raise InputError("supplied plague does not spread to the whole space")
        if not res.certified_minimal and popcount(hint) < size:
            size, witness = popcount(hint), from_mask(hint)
    bound = Fraction(size, space.size)
    if res.certified_minimal:
        imm = Fraction(res.size, space.size)
        verdict = "holds" if imm <= wrep.weight else "fails"
    else:
        imm = None
        verdict = "holds" if bound <= wrep.weight else "inconclusive"
    return ConjectureResult(imm, bound, wrep.weight, verdict, witness, res.certified_minimal,
                            wrep.special)
