import random

import pytest

from hurwitz_plague.coverings import (LabeledCovering, check_constraints, covering_from_json,
                                      covering_of, cycle_label, cycle_through, enumerate_coverings,
                                      eval_linear, gauge_to_tree, generic_template, lift_covering,
                                      order_mod, parse_linear, regauge, relabel_covering,
                                      sigma_cycle_lengths, spanning_tree)
from hurwitz_plague.orbits import (InvariantError, find_equivariant_map, is_simply_intersecting,
                                   perm_cycles)
from hurwitz_plague.racks import InputError
from hurwitz_plague.robust import builtin_graph, builtin_template, match_builtin, span_graph
from hurwitz_plague.schreier import (SchreierGraph, are_isomorphic, quotient, xy_cycles,
                                     yx_cycles)

from conftest import random_covering, random_graph


@pytest.fixture(scope="module")
def s3_cov(s3_orbit8):
    return covering_of(s3_orbit8).covering


@pytest.fixture(scope="module")
def s3_named(s3_cov):
    name, cov, values = match_builtin(s3_cov, ["S3_8"])
    return cov, values


@pytest.fixture(scope="module")
def g7():
    return builtin_template("G7_52").instantiate(7, {"a": 2, "b": 4, "c": 1})


def test_s3_derive_gives_a_b_one(s3_cov, s3_named):
    assert s3_cov.N == 2
    for arrow in s3_cov.tree:
        assert s3_cov.label(arrow) == 0
    cov, values = s3_named
    assert values == {"a": 1, "b": 1}


def test_s3_cycle_labels(s3_named):
    cov, _ = s3_named
    # template numbering: v1 = 0, v2 = 1, v3 = 2, v4 = 3
    assert cycle_label(cov, [0, 2, 1], "xy") == 0
    assert cycle_label(cov, [3], "xy") == 0
    assert sorted(map(sorted, xy_cycles(cov.graph))) == [[0, 1, 2], [3]]


def test_cycle_label_rejects_non_cycle(s3_named):
    cov, _ = s3_named
    with pytest.raises(InputError):
        cycle_label(cov, [0, 1, 2], "xy")
    with pytest.raises(InputError):
        cycle_label(cov, [3], "zz")


def test_trivial_covering_labels(s3_cov):
    t = generic_template(s3_cov.graph)
    cov = t.instantiate(1, {s: 0 for s in t.symbols})
    assert set(cov.x_label) == {0} and set(cov.y_label) == {0}
    for c in xy_cycles(cov.graph):
        assert cycle_label(cov, c, "xy") == 0


def test_cycle_labels_survive_tree_change():
    rng = random.Random(7)
    checked = 0
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 9))
        cov = random_covering(rng, g, rng.choice([2, 5, 7, 11]))
        if cov is None or not check_constraints(cov, False).passed:
            continue
        before = ([cycle_label(cov, c, "xy") for c in xy_cycles(g)],
                  [cycle_label(cov, c, "yx") for c in yx_cycles(g)])
        root = rng.randrange(g.n)
        other = gauge_to_tree(cov, spanning_tree(g, root), root)
        for arrow in other.tree:
            assert other.label(arrow) == 0
        after = ([cycle_label(other, c, "xy") for c in xy_cycles(g)],
                 [cycle_label(other, c, "yx") for c in yx_cycles(g)])
        assert before == after
        checked += 1
    assert checked >= 10


def test_constraints_pass_on_s3_and_g7(s3_cov, g7):
    assert check_constraints(s3_cov).passed
    rep = check_constraints(g7)
    assert rep.passed
    rules = {r for r, _, _ in rep.entries}
    assert "x-loop 3a = -1" in rules and "y-loop 2a = 1" in rules


def test_constraints_name_the_shared_pair():
    # two x-fixed vertices (v1 and v5) on one xy-cycle and one yx-cycle
    g = span_graph(1, ["X", "X"])
    t = generic_template(g)
    cov = t.instantiate(1, {s: 0 for s in t.symbols})
    rep = check_constraints(cov)
    assert not rep.passed
    where = {w for rule, w, ok in rep.failures() if rule == "xy and yx path labels differ"}
    assert "v1->v5" in where
    assert check_constraints(cov, simply_intersecting_required=False).passed


def test_constraints_report_bad_sums(g7):
    bad = LabeledCovering(g7.graph, 7, list(g7.x_label), list(g7.y_label), g7.tree)
    bad.x_label[0] = 3
    rules = {r for r, _, _ in check_constraints(bad).failures()}
    assert "x-loop 3a = -1" in rules


def test_lift_single_vertex():
    cov = LabeledCovering(SchreierGraph([0], [0]), 1, [0], [0])
    sp = lift_covering(cov)
    assert sp.size == 1 and sp.sigma1 == [0] and sp.sigma2 == [0]


def test_lift_s3_matches_orbit(s3_cov, s3_orbit8):
    sp = lift_covering(s3_cov)
    assert sp.size == 8
    assert any(find_equivariant_map(sp, s3_orbit8, start=p) is not None for p in range(8))


def test_g7_round_trip(g7):
    sp = lift_covering(g7)
    assert sp.size == 49
    assert is_simply_intersecting(sp)[0]
    g, q = quotient(sp)
    assert q.N == 7
    assert are_isomorphic(g, g7.graph)


def test_lift_rejects_broken_labels(g7):
    bad = LabeledCovering(g7.graph, 7, list(g7.x_label), list(g7.y_label))
    bad.y_label[0] = (bad.y_label[0] + 1) % 7
    with pytest.raises(InvariantError):
        lift_covering(bad)


def test_enumerate_g7():
    found = enumerate_coverings(builtin_graph("G7_52"), 21, template=builtin_template("G7_52"))
    assert [c.name() for c in found] == ["7{5,2};N=7;(2,4,1)"]


def test_enumerate_generic_g7_agrees():
    found = enumerate_coverings(builtin_graph("G7_52"), 14)
    assert len(found) == 1 and found[0].N == 7
    assert builtin_template("G7_52").fit(found[0]) == {"a": 2, "b": 4, "c": 1}


def test_enumerate_cor_graph_empty():
    assert enumerate_coverings(span_graph(1, ["X", "X"]), 12) == []


def test_enumerate_single_vertex():
    found = enumerate_coverings(SchreierGraph([0], [0]), 1)
    assert len(found) == 1
    assert found[0].x_label == [0] and found[0].y_label == [0]


def test_prefilter_does_not_change_result():
    rng = random.Random(3)
    for _ in range(8):
        g = random_graph(rng, rng.randint(1, 7))
        a = enumerate_coverings(g, 5, prefilter=True)
        b = enumerate_coverings(g, 5, prefilter=False)
        assert [c.name() for c in a] == [c.name() for c in b]


def test_enumerate_rejects_bad_input():
    with pytest.raises(InputError):
        enumerate_coverings(SchreierGraph([0, 1], [0, 1]), 3)
    with pytest.raises(InputError):
        enumerate_coverings(SchreierGraph([0], [0]), 3, require="nonsense")


def test_sigma_cycle_lengths_examples(s3_named, g7):
    cov, _ = s3_named
    assert sigma_cycle_lengths(cov, 0) == (3, 3)
    assert set(sigma_cycle_lengths(cov, 2)) == {1, 3}
    for v in (0, 1, 6):
        assert sigma_cycle_lengths(g7, v) == (5, 5)


def _measured(sp, p):
    c1 = next(c for c in perm_cycles(sp.sigma1) if p in c)
    c2 = next(c for c in perm_cycles(sp.sigma2) if p in c)
    return len(c1), len(c2)


def test_sigma_cycle_lengths_match_lift():
    rng = random.Random(11)
    checked = 0
    for _ in range(60):
        g = random_graph(rng, rng.randint(1, 8))
        cov = random_covering(rng, g, rng.choice([1, 2, 4, 5, 7]))
        if cov is None or not check_constraints(cov, False).passed:
            continue
        sp = lift_covering(cov)
        for v in range(g.n):
            for i in range(cov.N):
                assert sigma_cycle_lengths(cov, v) == _measured(sp, sp.index(v, i))
        checked += 1
    assert checked >= 15


def test_derived_covering_round_trip(s3_orbit8):
    d = covering_of(s3_orbit8)
    assert check_constraints(d.covering).passed
    g, q = quotient(lift_covering(d.covering))
    assert q.N == d.covering.N and are_isomorphic(g, d.covering.graph)


def test_regauge_keeps_lift(g7):
    shifted = regauge(g7, [3, 1, 4, 1, 5, 2, 6])
    assert shifted.x_label != g7.x_label
    a, b = lift_covering(g7), lift_covering(shifted)
    assert find_equivariant_map(a, b) is not None


def test_relabel_covering(g7):
    perm = [6, 5, 4, 3, 2, 1, 0]
    other = relabel_covering(g7, perm)
    for v in range(7):
        assert sigma_cycle_lengths(other, perm[v]) == sigma_cycle_lengths(g7, v)


def test_cycle_through(g7):
    c = cycle_through(g7, 0, "xy")
    assert len(c) == 5 and c[0] == 0


def test_order_mod():
    assert order_mod(0, 7) == 1
    assert order_mod(3, 9) == 3
    assert order_mod(2, 7) == 7
    assert order_mod(5, 1) == 1


def test_parse_linear():
    assert parse_linear("1-b") == {"": 1, "b": -1}
    assert parse_linear("0") == {}
    assert parse_linear("2a+3") == {"a": 2, "": 3}
    assert parse_linear("−1") == {"": -1}
    assert eval_linear(parse_linear("1-2b"), {"b": 3}) == -5
    for bad in ("", "1+", "a*"):
        with pytest.raises(InputError):
            parse_linear(bad)


def test_covering_json_round_trip(g7):
    back = covering_from_json(g7.to_json())
    assert back.x_label == g7.x_label and back.y_label == g7.y_label
    assert back.tree == g7.tree and back.N == 7
    # list-form labels are accepted too
    data = g7.to_json()
    data["x_labels"] = list(g7.x_label)
    assert covering_from_json(data).x_label == g7.x_label
    with pytest.raises(InputError):
        covering_from_json({"N": 2})


def test_covering_validation():
    g = SchreierGraph([0], [0])
    with pytest.raises(InputError):
        LabeledCovering(g, 0, [0], [0])
    with pytest.raises(InputError):
        LabeledCovering(g, 2, [0, 1], [0])


def test_template_fit_rejects_other_graph(g7):
    assert builtin_template("G10_10").fit(g7) is None
