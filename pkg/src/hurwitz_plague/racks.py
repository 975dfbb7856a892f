"""Finite racks and quandles as dense operation tables.

Elements are the indices 0..n-1 and ``table[r][s]`` is ``r ▷ s``.
Groups enter only through their multiplication tables; the helpers at the
bottom close generator sets (permutations or any hashable elements with a
product) into such tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Iterable, Optional, Sequence


class InputError(ValueError):
    """Malformed user input (bad table, bad JSON, unknown name)."""


@dataclass(frozen=True)
class RackCheck:
    is_rack: bool
    is_quandle: bool
    is_braided: bool
    violation: Optional[tuple] = None
    reason: str = ""


def _check_square(table) -> int:
    n = len(table)
    if n == 0:
        raise InputError("empty table")
    for r, row in enumerate(table):
        if len(row) != n:
            raise InputError(f"row {r} has length {len(row)}, expected {n}")
        for s, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise InputError(f"entry table[{r}][{s}] = {v!r} out of range")
    return n


def validate_rack(table: Sequence[Sequence[int]]) -> RackCheck:
    """Check the rack axioms by enumeration and report the first violation."""
    n = _check_square(table)
    for r in range(n):
        if len(set(table[r])) != n:
            row = list(table[r])
            s1 = next(s for s in range(n) if row.count(row[s]) > 1)
            s2 = next(s for s in range(s1 + 1, n) if row[s] == row[s1])
            return RackCheck(False, False, False, (r, s1, s2), "row map not injective")
    for r, s, t in product(range(n), repeat=3):
        if table[r][table[s][t]] != table[table[r][s]][table[r][t]]:
            return RackCheck(False, False, False, (r, s, t), "self-distributivity fails")
    quandle = all(table[r][r] == r for r in range(n))
    if not quandle:
        r = next(r for r in range(n) if table[r][r] != r)
        return RackCheck(True, False, False, (r,), "not idempotent")
    for r, s in product(range(n), repeat=2):
        if table[r][table[s][r]] != s and table[r][s] != s:
            return RackCheck(True, True, False, (r, s), "braided alternative fails")
    return RackCheck(True, True, True)


@dataclass(frozen=True)
class Rack:
    table: tuple
    name: str = ""
    is_quandle: bool = field(init=False)
    is_braided: bool = field(init=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        check = validate_rack(table)
        if not check.is_rack:
            raise InputError(f"not a rack: {check.reason} at {check.violation}")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "is_quandle", check.is_quandle)
        object.__setattr__(self, "is_braided", check.is_braided)
        inv = []
        for row in table:
            back = [0] * len(row)
            for s, v in enumerate(row):
                back[v] = s
            inv.append(tuple(back))
        object.__setattr__(self, "_inverse", tuple(inv))

    @property
    def n(self) -> int:
        return len(self.table)

    def op(self, r: int, s: int) -> int:
        return self.table[r][s]

    def op_inv(self, r: int, s: int) -> int:
        """The unique t with r ▷ t = s."""
        return self._inverse[r][s]

    def to_json(self) -> dict:
        return {"n": self.n, "table": [list(row) for row in self.table]}


def rack_from_json(data: dict) -> Rack:
    if "table" in data:
        if data.get("n", len(data["table"])) != len(data["table"]):
            raise InputError("'n' does not match the table size")
        return Rack(data["table"], name=data.get("name", ""))
    if "mult" in data:
        return conjugation_quandle(data["mult"], data["class"], name=data.get("name", ""))
    raise InputError("rack JSON needs 'table' or 'mult'+'class'")


# -- groups ---------------------------------------------------------------


def check_group_table(mult: Sequence[Sequence[int]]) -> int:
    """Validate a group table; returns the identity index."""
    n = _check_square(mult)
    ids = [e for e in range(n) if all(mult[e][a] == a and mult[a][e] == a for a in range(n))]
    if not ids:
        raise InputError("group table has no identity")
    e = ids[0]
    for a in range(n):
        if not any(mult[a][b] == e for b in range(n)):
            raise InputError(f"element {a} has no inverse")
    if n <= 64:
        for a, b, c in product(range(n), repeat=3):
            if mult[mult[a][b]][c] != mult[a][mult[b][c]]:
                raise InputError(f"not associative at {(a, b, c)}")
    return e


def conjugation_quandle(mult, class_elements: Iterable[int], name: str = "") -> Rack:
    """r ▷ s = r s r⁻¹ on a conjugation-closed subset of a group."""
    e = check_group_table(mult)
    n = len(mult)
    cls = list(dict.fromkeys(int(c) for c in class_elements))
    if not cls:
        raise InputError("empty class")
    pos = {g: i for i, g in enumerate(cls)}
    inv = [next(b for b in range(n) if mult[a][b] == e) for a in range(n)]
    table = []
    for r in cls:
        row = []
        for s in cls:
            v = mult[mult[r][s]][inv[r]]
            if v not in pos:
                raise InputError(f"class not closed: {r} ▷ {s} = {v} escapes")
            row.append(pos[v])
        table.append(row)
    return Rack(table, name=name)


@dataclass
class Group:
    """A finite group given by its multiplication table plus element names."""

    mult: list
    names: list
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.mult)

    def identity(self) -> int:
        return next(e for e in range(self.order) if self.mult[e][e] == e)

    def inverse(self, a: int) -> int:
        e = self.identity()
        return next(b for b in range(self.order) if self.mult[a][b] == e)

    def conjugacy_classes(self) -> list:
        seen, classes = set(), []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.mult[self.mult[g][a]][self.inverse(g)] for g in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def class_quandle(self, cls: Sequence[int], label: str = "") -> Rack:
        return conjugation_quandle(self.mult, cls, name=label or f"{self.name}:{cls}")

    def to_json(self, cls) -> dict:
        return {"n": self.order, "mult": self.mult, "class": list(cls), "name": self.name}


def close_group(gens: Sequence[Hashable], mul: Callable, identity: Hashable, name: str = "",
                label: Callable = str) -> Group:
    """Close generators under ``mul`` into a table, identity first."""
    elems = [identity]
    index = {identity: 0}
    frontier = [identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mul(a, g)
                if b not in index:
                    index[b] = len(elems)
                    elems.append(b)
                    nxt.append(b)
        frontier = nxt
    mult = [[index[mul(a, b)] for b in elems] for a in elems]
    return Group(mult, [label(a) for a in elems], name)


def perm_mul(p: tuple, q: tuple) -> tuple:
    """Composition p∘q (apply q first)."""
    return tuple(p[i] for i in q)


def permutation_group(gens: Sequence[Sequence[int]], name: str = "") -> Group:
    gens = [tuple(g) for g in gens]
    degree = len(gens[0])
    return close_group(gens, perm_mul, tuple(range(degree)), name, label=cycle_notation)


def cycle_notation(p: Sequence[int]) -> str:
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def _cycle(degree: int, *cycles) -> tuple:
    p = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a - 1] = b - 1
    return tuple(p)


def quaternion_group() -> Group:
    # units 1, i, j, k as 0..3 with a sign bit
    unit = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(a, b):
        s, u = unit[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    def lab(a):
        return ("-" if a[0] < 0 else "") + "1ijk"[a[1]]

    return close_group([(1, 1), (1, 2)], mul, (1, 0), "Q8", label=lab)


def cyclic_product(*orders: int) -> Group:
    """Direct product of cyclic groups, written additively."""
    gens = []
    for k in range(len(orders)):
        g = [0] * len(orders)
        g[k] = 1
        gens.append(tuple(g))

    def mul(a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, orders))

    name = "x".join(f"C{m}" for m in orders)
    return close_group(gens, mul, tuple(0 for _ in orders), name)


def symmetric_group(degree: int) -> Group:
    gens = [_cycle(degree, (1, 2))]
    if degree > 2:
        gens.append(_cycle(degree, tuple(range(1, degree + 1))))
    return permutation_group(gens, f"S{degree}")


def dihedral_group(m: int) -> Group:
    """Symmetries of the m-gon, order 2m."""
    rot = tuple((i + 1) % m for i in range(m))
    ref = tuple((-i) % m for i in range(m))
    return permutation_group([rot, ref], f"D{m}")


def small_groups(max_order: int = 8) -> list:
    """One representative of every isomorphism class of order <= 8."""
    groups = [cyclic_product(1)]
    groups[0].name = "C1"
    for m in range(2, max_order + 1):
        groups.append(cyclic_product(m))
    extra = [cyclic_product(2, 2), symmetric_group(3), cyclic_product(2, 4),
             cyclic_product(2, 2, 2), dihedral_group(4), quaternion_group()]
    groups.extend(g for g in extra if g.order <= max_order)
    return groups


def dihedral_quandle(m: int) -> Rack:
    """r ▷ s = 2r − s on Z_m."""
    return Rack([[(2 * r - s) % m for s in range(m)] for r in range(m)], name=f"dihedral-{m}")


def trivial_rack(n: int) -> Rack:
    return Rack([list(range(n)) for _ in range(n)], name=f"trivial-{n}")


def transposition_quandle(degree: int) -> Rack:
    grp = symmetric_group(degree)
    cls = [i for i, nm in enumerate(grp.names) if nm.count("(") == 1 and nm.count(" ") == 1]
    # order the class as (2 3), (1 3), (1 2) for degree 3 to match r1, r2, r3
    cls.sort(key=lambda i: _transposition_key(grp.names[i], degree))
    return grp.class_quandle(cls, f"S{degree}-transpositions")


def _transposition_key(name: str, degree: int):
    a, b = (int(t) for t in name.strip("()").split())
    if degree == 3:
        return {(2, 3): 0, (1, 3): 1, (1, 2): 2}[(a, b)]
    return (a, b)


BUILTIN_RACKS = {
    "S3-transpositions": lambda: transposition_quandle(3),
    "S4-transpositions": lambda: transposition_quandle(4),
    "dihedral-3": lambda: dihedral_quandle(3),
    "trivial-1": lambda: trivial_rack(1),
    "trivial-2": lambda: trivial_rack(2),
}


def builtin_rack(name: str) -> Rack:
    if name in BUILTIN_RACKS:
        return BUILTIN_RACKS[name]()
    if name.startswith("dihedral-") and name[9:].isdigit():
        return dihedral_quandle(int(name[9:]))
    if name.startswith("trivial-") and name[8:].isdigit():
        return trivial_rack(int(name[8:]))
    raise InputError(f"unknown built-in rack {name!r}")


def class_quandles(max_order: int = 8) -> list:
    """All conjugacy-class quandles of the small groups, labelled."""
    out = []
    for grp in small_groups(max_order):
        for cls in grp.conjugacy_classes():
            label = f"{grp.name}[{','.join(grp.names[c] for c in cls)}]"
            out.append(grp.class_quandle(cls, label))
    return out
