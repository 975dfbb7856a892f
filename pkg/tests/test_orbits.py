import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_plague.orbits import (BRAIDED_SIZES, PermutationSpace, act_sigma, centralizer,
                                   check_braided_sizes, compose, cycle_length_pairs,
                                   decompose_cube, enumerate_orbit, find_equivariant_map, invert,
                                   is_simply_intersecting, perm_cycles, perm_order, perm_power,
                                   space_from_json)
from hurwitz_plague.racks import InputError, builtin_rack, dihedral_quandle, trivial_rack


def test_compose_is_function_notation():
    f, g = [1, 2, 0], [0, 2, 1]
    assert compose(f, g) == [f[g[p]] for p in range(3)]


def test_perm_helpers():
    p = [1, 2, 0, 4, 3]
    assert perm_order(p) == 6
    assert perm_power(p, 6) == list(range(5))
    assert compose(p, invert(p)) == list(range(5))
    assert perm_cycles(p) == [[0, 1, 2], [3, 4]]


def test_s3_census(s3):
    sizes = sorted(o.size for o in decompose_cube(s3))
    assert sizes == [1, 1, 1, 8, 8, 8]


def test_decompose_orders_by_minimal_triple(s3):
    seeds = [o.points[0] for o in decompose_cube(s3)]
    assert seeds == sorted(seeds)
    assert all(o.points[0] == min(o.points) for o in decompose_cube(s3))


def test_orbit_relations(s3_orbit8):
    o = s3_orbit8
    assert o.braid_relation_holds()
    d = list(o.delta().perm)
    for s in (o.sigma1, o.sigma2):
        assert compose(d, s) == compose(s, d)
    assert o.is_transitive()
    assert o.delta().order == 2


def test_inverse_generators(s3):
    for t in [(0, 1, 2), (2, 2, 1), (1, 0, 0)]:
        assert act_sigma(-1, act_sigma(1, t, s3), s3) == t
        assert act_sigma(-2, act_sigma(2, t, s3), s3) == t
    with pytest.raises(InputError):
        act_sigma(3, (0, 0, 0), s3)


def test_single_point_orbit():
    o = enumerate_orbit(trivial_rack(1), (0, 0, 0))
    assert o.size == 1 and o.sigma1 == [0]


def test_bad_seed(s3):
    with pytest.raises(InputError):
        enumerate_orbit(s3, (0, 1))
    with pytest.raises(InputError):
        enumerate_orbit(s3, (0, 1, 5))


def test_soft_cap(s3):
    with pytest.raises(InputError, match="soft cap"):
        enumerate_orbit(s3, (0, 1, 2), cap=4)


def test_simply_intersecting_s3(s3_orbit8):
    ok, witness = is_simply_intersecting(s3_orbit8)
    assert ok and witness is None


def test_not_simply_intersecting_witness():
    # trivial rack: σ1 and σ2 swap entries; the 3 points of (0,1,1)... use a 2-element trivial rack
    o = enumerate_orbit(trivial_rack(2), (0, 1, 1))
    ok, witness = is_simply_intersecting(o)
    if not ok:
        c1, c2, *_ = witness
        assert len(set(c1) & set(c2)) >= 2


def test_cycle_length_pairs(s3_orbit8):
    pairs = cycle_length_pairs(s3_orbit8)
    assert len(pairs) == 8
    assert sorted(set(pairs)) == [(1, 3), (3, 1), (3, 3)]


def test_braided_sizes():
    for name in ("S3-transpositions", "S4-transpositions"):
        assert check_braided_sizes(builtin_rack(name)).passed
    braided = [m for m in range(1, 10) if dihedral_quandle(m).is_braided]
    assert 3 in braided and 5 not in braided
    for m in braided:
        assert set(check_braided_sizes(dihedral_quandle(m)).histogram) <= BRAIDED_SIZES


def test_braided_sizes_requires_braided():
    with pytest.raises(InputError):
        check_braided_sizes(dihedral_quandle(4))


def test_equivariant_map_and_centralizer(s3_orbit8):
    o = s3_orbit8
    f = find_equivariant_map(o, o, start=0)
    assert f == list(range(o.size))
    cent = centralizer(o)
    d = list(o.delta().perm)
    assert d in cent and list(range(o.size)) in cent
    for c in cent:
        assert compose(c, o.sigma1) == compose(o.sigma1, c)


def test_permutation_space_round_trip(s3_orbit8):
    sp = space_from_json(s3_orbit8.to_json())
    assert sp.sigma1 == s3_orbit8.sigma1
    assert sp.point_name(0) == "0,1,2"
    with pytest.raises(InputError):
        PermutationSpace([1, 0, 2, 3], [0, 1, 3, 2])  # commuting, so σ1σ2σ1 = σ2
    with pytest.raises(InputError):
        space_from_json({"sigma1": [0]})


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.data())
def test_orbits_partition_cube(m, data):
    rack = dihedral_quandle(m)
    orbits = decompose_cube(rack)
    pts = [p for o in orbits for p in o.points]
    assert len(pts) == len(set(pts)) == m ** 3
    o = data.draw(st.sampled_from(orbits))
    assert o.braid_relation_holds()
