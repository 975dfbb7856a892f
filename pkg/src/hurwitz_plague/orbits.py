"""Hurwitz orbits of B3 on R^3.

Permutations are stored as index lists.  Composition follows function
notation throughout the package: ``compose(f, g)[p] == f[g[p]]``, so a braid
word acts on a point by its rightmost letter first.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from math import lcm
from typing import List, Optional, Sequence, Tuple

from .racks import InputError, Rack

BRAIDED_SIZES = frozenset({1, 3, 6, 8, 9, 12, 16, 24})
ORBIT_SOFT_CAP = 10**6


class InvariantError(RuntimeError):
    """A structural law that must hold by construction was violated."""


def compose(*perms: Sequence[int]) -> list:
    """compose(f, g, h)[p] = f[g[h[p]]]."""
    out = list(perms[-1])
    for f in reversed(perms[:-1]):
        out = [f[q] for q in out]
    return out


def invert(perm: Sequence[int]) -> list:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return inv


def perm_power(perm: Sequence[int], k: int) -> list:
    out = list(range(len(perm)))
    base = list(perm) if k >= 0 else invert(perm)
    for _ in range(abs(k)):
        out = [base[q] for q in out]
    return out


def perm_cycles(perm: Sequence[int]) -> List[List[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc, j = [], start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        cycles.append(cyc)
    return cycles


def perm_order(perm: Sequence[int]) -> int:
    out = 1
    for c in perm_cycles(perm):
        out = lcm(out, len(c))
    return out


@dataclass(frozen=True)
class DeltaPermutation:
    perm: tuple
    order: int


class BraidSpace:
    """A finite set with two permutations satisfying the braid relation."""

    sigma1: list
    sigma2: list

    @property
    def size(self) -> int:
        return len(self.sigma1)

    def sigma(self, which: int) -> list:
        if which == 1:
            return self.sigma1
        if which == 2:
            return self.sigma2
        raise InputError("generator must be 1 or 2")

    def point_name(self, p: int) -> str:
        return str(p)

    def braid_relation_holds(self) -> bool:
        s1, s2 = self.sigma1, self.sigma2
        return compose(s1, s2, s1) == compose(s2, s1, s2)

    def delta(self) -> DeltaPermutation:
        s12 = compose(self.sigma1, self.sigma2)
        d = compose(s12, s12, s12)
        return DeltaPermutation(tuple(d), perm_order(d))

    def is_transitive(self) -> bool:
        seen, todo = {0}, [0]
        gens = [self.sigma1, self.sigma2, invert(self.sigma1), invert(self.sigma2)]
        while todo:
            p = todo.pop()
            for g in gens:
                if g[p] not in seen:
                    seen.add(g[p])
                    todo.append(g[p])
        return len(seen) == self.size


class PermutationSpace(BraidSpace):
    """A B3-space given directly by its two generator permutations."""

    def __init__(self, sigma1: Sequence[int], sigma2: Sequence[int], names=None):
        self.sigma1 = [int(v) for v in sigma1]
        self.sigma2 = [int(v) for v in sigma2]
        n = len(self.sigma1)
        for p in (self.sigma1, self.sigma2):
            if len(p) != n or sorted(p) != list(range(n)):
                raise InputError("sigma1 and sigma2 must be permutations of one set")
        if not self.braid_relation_holds():
            raise InputError("sigma1, sigma2 violate the braid relation")
        self.names = names
        self.base = 0

    def point_name(self, p: int) -> str:
        return self.names[p] if self.names else str(p)


def space_from_json(data: dict) -> PermutationSpace:
    """Read an orbit dump (only the permutations and point list are used)."""
    try:
        names = [",".join(map(str, t)) for t in data["points"]] if "points" in data else None
        return PermutationSpace(data["sigma1"], data["sigma2"], names)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad orbit JSON: {exc}") from None


def sigma_cycles(space: BraidSpace, which: int) -> List[List[int]]:
    return perm_cycles(space.sigma(which))


def is_simply_intersecting(space: BraidSpace) -> Tuple[bool, Optional[tuple]]:
    """True iff every σ1-cycle meets every σ2-cycle at most once.

    On failure the witness is (σ1-cycle, σ2-cycle) as sorted tuples.
    """
    c1 = sigma_cycles(space, 1)
    c2 = sigma_cycles(space, 2)
    owner1 = [0] * space.size
    owner2 = [0] * space.size
    for k, c in enumerate(c1):
        for p in c:
            owner1[p] = k
    for k, c in enumerate(c2):
        for p in c:
            owner2[p] = k
    met = {}
    for p in range(space.size):
        key = (owner1[p], owner2[p])
        if key in met:
            i, j = key
            return False, (tuple(sorted(c1[i])), tuple(sorted(c2[j])))
        met[key] = p
    return True, None


def cycle_length_pairs(space: BraidSpace) -> List[Tuple[int, int]]:
    """Per point: (length of its σ1-cycle, length of its σ2-cycle)."""
    out = [[0, 0] for _ in range(space.size)]
    for which in (1, 2):
        for c in sigma_cycles(space, which):
            for p in c:
                out[p][which - 1] = len(c)
    return [tuple(v) for v in out]


class HurwitzOrbit(BraidSpace):
    def __init__(self, rack: Rack, points: List[tuple]):
        self.rack = rack
        self.points = points
        self.index = {t: k for k, t in enumerate(points)}
        self.sigma1 = [self.index[act_sigma(1, t, rack)] for t in points]
        self.sigma2 = [self.index[act_sigma(2, t, rack)] for t in points]
        self.base = 0

    def point_name(self, p: int) -> str:
        return ",".join(map(str, self.points[p]))

    def to_json(self) -> dict:
        return {
            "rack": self.rack.name,
            "points": [list(t) for t in self.points],
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "base": self.base,
        }


def act_sigma(which: int, triple: tuple, rack: Rack) -> tuple:
    r, s, t = triple
    if which == 1:
        return (rack.op(r, s), r, t)
    if which == 2:
        return (r, rack.op(s, t), s)
    if which == -1:
        return (s, rack.op_inv(s, r), t)
    if which == -2:
        return (r, t, rack.op_inv(t, s))
    raise InputError(f"unknown generator {which}")


def enumerate_orbit(rack: Rack, seed: Sequence[int], cap: int = ORBIT_SOFT_CAP) -> HurwitzOrbit:
    seed = tuple(int(v) for v in seed)
    if len(seed) != 3 or not all(0 <= v < rack.n for v in seed):
        raise InputError(f"seed {seed} is not a triple of rack elements")
    points = [seed]
    seen = {seed}
    queue = deque([seed])
    while queue:
        t = queue.popleft()
        for which in (1, -1, 2, -2):
            u = act_sigma(which, t, rack)
            if u not in seen:
                if len(points) >= cap:
                    raise InputError(f"orbit exceeds the soft cap of {cap} points")
                seen.add(u)
                points.append(u)
                queue.append(u)
    return HurwitzOrbit(rack, points)


def decompose_cube(rack: Rack) -> List[HurwitzOrbit]:
    """Partition R^3 into orbits, ordered by their smallest triple."""
    n = rack.n
    done = set()
    orbits = []
    for r in range(n):
        for s in range(n):
            for t in range(n):
                if (r, s, t) in done:
                    continue
                orb = enumerate_orbit(rack, (r, s, t))
                done.update(orb.points)
                orbits.append(orb)
    return orbits


@dataclass
class SizeReport:
    histogram: dict
    passed: bool
    offending: list


def check_braided_sizes(rack: Rack) -> SizeReport:
    if not rack.is_braided:
        raise InputError("rack is not braided")
    sizes = [o.size for o in decompose_cube(rack)]
    hist = dict(sorted(Counter(sizes).items()))
    bad = sorted(s for s in hist if s not in BRAIDED_SIZES)
    return SizeReport(hist, not bad, bad)


def _extend(ga, gb, start: int, target: int, size: int):
    f = {start: target}
    todo = [start]
    while todo:
        p = todo.pop()
        for pa, pb in zip(ga, gb):
            q, q2 = pa[p], pb[f[p]]
            if q in f:
                if f[q] != q2:
                    return None
            else:
                f[q] = q2
                todo.append(q)
    if len(f) != size or len(set(f.values())) != size:
        return None
    return [f[p] for p in range(size)]


def _gens(space: BraidSpace) -> list:
    return [space.sigma1, space.sigma2, invert(space.sigma1), invert(space.sigma2)]


def find_equivariant_map(a: BraidSpace, b: BraidSpace, start: int = 0):
    """Bijection f with f∘σi = σi∘f (i = 1, 2), as a list, or None."""
    if a.size != b.size:
        return None
    ga, gb = _gens(a), _gens(b)
    for target in range(b.size):
        f = _extend(ga, gb, start, target, a.size)
        if f is not None:
            return f
    return None


def centralizer(space: BraidSpace) -> List[list]:
    """All permutations commuting with σ1 and σ2 (space assumed transitive)."""
    gens = _gens(space)
    out = []
    for target in range(space.size):
        f = _extend(gens, gens, 0, target, space.size)
        if f is not None:
            out.append(f)
    return out
