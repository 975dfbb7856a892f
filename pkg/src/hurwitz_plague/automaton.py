"""Monotone cellular automata on finite sets.

Every rule is stored as Horn clauses "all premises present => conclusion
present".  A triple (a, b, c) of the orbit rule gives the clauses
{a,b}->c, {a,c}->b, {b,c}->a.  Triple positions are kept: a degenerate
triple (p, p, q) lets p alone infect q, because two of its three positions
are occupied.

States are Python ints used as bitsets (bit k set = point k infected).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .orbits import BraidSpace, compose, invert
from .racks import InputError


@dataclass(frozen=True)
class SubsetState:
    size: int
    bits: int = 0

    @classmethod
    def of(cls, size: int, indices: Iterable[int]) -> "SubsetState":
        return cls(size, to_mask(indices))

    def indices(self) -> List[int]:
        return from_mask(self.bits)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def hex(self) -> str:
        return format(self.bits, "x")


def to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def from_mask(mask: int) -> List[int]:
    out, k = [], 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class AutomatonRule:
    """Horn-clause rule over the ground set 0..size-1."""

    def __init__(self, size: int, clauses: Sequence[tuple], triples=None, kind: str = "horn",
                 offsets=None):
        self.size = size
        self.kind = kind
        self.triples = list(triples) if triples is not None else None
        self.offsets = offsets
        self.clauses = []
        seen = set()
        for premises, concl in clauses:
            pm = to_mask(premises)
            if pm >> concl & 1 or (pm, concl) in seen:
                continue  # trivially satisfied or duplicate
            seen.add((pm, concl))
            self.clauses.append((pm, concl))
        self.by_point: List[list] = [[] for _ in range(size)]
        for pm, concl in self.clauses:
            for q in from_mask(pm):
                self.by_point[q].append((pm, concl))
        self.full = (1 << size) - 1

    def _mask(self, state) -> int:
        if isinstance(state, SubsetState):
            if state.size != self.size:
                raise InputError(f"state has size {state.size}, rule has {self.size}")
            return state.bits
        if isinstance(state, int):
            return state
        return to_mask(state)


def rule_from_triples(size: int, triples: Sequence[tuple], kind: str = "triples") -> AutomatonRule:
    clauses = []
    for a, b, c in triples:
        clauses += [((a, b), c), ((a, c), b), ((b, c), a)]
    return AutomatonRule(size, clauses, triples=triples, kind=kind)


def orbit_triples(space: BraidSpace) -> List[tuple]:
    s1, s2 = space.sigma1, space.sigma2
    return [(p, s2[p], s1[s2[p]]) for p in range(space.size)]


def orbit_rule(space: BraidSpace) -> AutomatonRule:
    """Two of p, σ2 p, σ1σ2 p infected => the third one too."""
    return rule_from_triples(space.size, orbit_triples(space), kind="orbit")


def zm_rule(m: int, offsets: Sequence[int]) -> AutomatonRule:
    """On Z_m: w becomes infected once every w - a_i is infected."""
    if m < 2:
        raise InputError("m must be at least 2")
    offs = [a % m for a in offsets]
    if not offs or any(a == 0 for a in offs):
        raise InputError("offsets must be non-zero mod m")
    clauses = [([(w - a) % m for a in offs], w) for w in range(m)]
    return AutomatonRule(m, clauses, kind="zm", offsets=tuple(offs))


def step(rule: AutomatonRule, state):
    """One application of τ; returns the same type it was given."""
    mask = rule._mask(state)
    new = mask
    for pm, concl in rule.clauses:
        if pm & mask == pm:
            new |= 1 << concl
    return SubsetState(rule.size, new) if isinstance(state, SubsetState) else new


def closure_mask(rule: AutomatonRule, mask: int, closed_base: int = 0) -> int:
    """Least fixpoint containing ``mask``.

    ``closed_base`` may name a subset of ``mask`` that is already closed;
    only clauses touching the other points are then revisited.
    """
    todo = from_mask(mask & ~closed_base) if closed_base else from_mask(mask)
    by_point = rule.by_point
    while todo:
        q = todo.pop()
        for pm, concl in by_point[q]:
            if not mask >> concl & 1 and pm & mask == pm:
                mask |= 1 << concl
                todo.append(concl)
    return mask


def closure(rule: AutomatonRule, state):
    mask = closure_mask(rule, rule._mask(state))
    return SubsetState(rule.size, mask) if isinstance(state, SubsetState) else mask


def closure_by_iteration(rule: AutomatonRule, state) -> int:
    """Naive τⁿ until stable.  Kept as the reference implementation."""
    mask = rule._mask(state)
    while True:
        nxt = step(rule, mask)
        if nxt == mask:
            return mask
        mask = nxt


def is_quarantine(rule: AutomatonRule, subset) -> bool:
    mask = rule._mask(subset)
    return step(rule, mask) == mask


def is_plague(rule: AutomatonRule, subset) -> bool:
    return closure_mask(rule, rule._mask(subset)) == rule.full


def spreads_to(rule: AutomatonRule, I, J) -> bool:
    target = rule._mask(J)
    return closure_mask(rule, rule._mask(I)) & target == target


def meets_in_two(triples: Sequence[tuple], mask: int) -> Optional[tuple]:
    """A triple with exactly two of its three positions in ``mask``, if any."""
    for t in triples:
        if sum(mask >> p & 1 for p in t) == 2:
            return t
    return None


def seven_neighbor_step(space: BraidSpace, mask: int) -> int:
    """τ written with the seven-point neighbourhood of each point.

    Neighbourhood (1, σ2, σ1σ2, σ2⁻¹σ1⁻¹, σ1⁻¹, σ2⁻¹, σ1) and local rule
    f1 or f2 f3 or f4 f5 or f6 f7.
    """
    s1, s2 = space.sigma1, space.sigma2
    s1i, s2i = invert(s1), invert(s2)
    nbrs = [s2, compose(s1, s2), compose(s2i, s1i), s1i, s2i, s1]
    new = mask
    for w in range(space.size):
        if mask >> w & 1:
            continue
        f = [mask >> g[w] & 1 for g in nbrs]
        if f[0] & f[1] or f[2] & f[3] or f[4] & f[5]:
            new |= 1 << w
    return new
