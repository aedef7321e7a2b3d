from collections import Counter

import pytest
from hypothesis import given, strategies as st

from betamaps import oracle
from betamaps.beta_exact import bracket_table
from betamaps.bfg import (bfg_forward, bfg_inverse, bfg_problems, config_from_hypermap,
                          configurations, distances, hypermap_from_config, lower_completion, psi,
                          psi_inverse, verify_theta)
from betamaps.maps import HalfEdgeMap, StructureError, SuitablyLabelledMap
from betamaps.motzkin import MotzkinBridge
from betamaps.perms import Perm

EDGE = Perm.parse("(1,2)")
THETA16 = Perm.parse("(1,2,3,4)(5,6,7)(8,9,10,11,12)(13,14,15,16)")
GAMMA16 = MotzkinBridge.from_sequence(THETA16, [2, 1, 0, 1, 2, 1, 1, 1, 1, 2, 3, 2, 3, 2, 1, 2])
SIGMA16 = Perm.parse("(1,5,14)(6,8)(11,13)", range(1, 17))


@st.composite
def relabelled_theta(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    images = draw(st.permutations(range(1, n + 1)))
    return Perm(dict(zip(range(1, n + 1), images)))


def test_printed_hypermap():
    h = hypermap_from_config(GAMMA16, SIGMA16)
    assert h.theta == Perm.parse("(1,2)(5,6)(8,11,12)(13,14)")
    assert h.membership_problems(THETA16) == []
    assert config_from_hypermap(h, THETA16) == (GAMMA16, SIGMA16)


def test_printed_hypermap_through_the_bijection():
    m = psi(GAMMA16, SIGMA16)
    assert m.map.faces() == THETA16
    d = distances(m)
    assert all(m.label(v) == dv for v, dv in d.items())
    assert bfg_problems(hypermap_from_config(GAMMA16, SIGMA16), GAMMA16, SIGMA16) == []
    assert psi_inverse(m, THETA16) == (GAMMA16, SIGMA16)


def test_tilted_edge_config():
    gamma = MotzkinBridge.from_sequence(EDGE, [0, 1])
    h = hypermap_from_config(gamma, Perm.identity([1, 2]))
    assert [x.index for x in h.edges] == [2]
    assert h.white_vertices() and h.label(2) == 1 and not h.frustrated
    m = bfg_forward(h, EDGE)
    assert m.map.faces() == EDGE
    assert sorted(m.labels[x] for x in m.map.half_edges) == [0, 1]
    assert list(distances(m).values()) == [1]
    assert bfg_inverse(m) == h


def test_frustrated_edge_config():
    gamma = MotzkinBridge.from_sequence(EDGE, [0, 0])
    h = hypermap_from_config(gamma, EDGE)
    assert h.white_vertices() == [tuple(EDGE.universe)]
    assert h.label(1) == 1 and set(h.frustrated) == set(EDGE.universe)
    m = bfg_forward(h, EDGE)
    assert m.map.faces() == EDGE
    assert [m.labels[x] for x in m.map.half_edges] == [0, 0]
    assert len(m.frustrated_edges()) == 1
    assert distances(m) == {}
    assert bfg_inverse(m) == h


def test_nontransitive_config_rejected():
    theta = Perm.parse("(1,2)(3,4)")
    gamma = MotzkinBridge.from_sequence(theta, [0, 1, 0, 1])
    with pytest.raises(StructureError):
        hypermap_from_config(gamma, Perm.identity(range(1, 5)))


def test_edge_has_three_images():
    images = {psi(g, s) for g, s in configurations(EDGE)}
    assert len(images) == 3 == len(oracle.enumerate_suitably_labelled(EDGE))


def test_four_cycle_round_trips_and_bijects():
    theta = Perm.parse("(1,2,3,4)")
    tally = verify_theta(theta, oracle.enumerate_suitably_labelled(theta))
    assert not [k for k in tally if k.endswith("-fail")]
    assert tally["configurations"] == tally["images"]


@pytest.mark.parametrize("cw,expected", [((1, 3), (1, 0, 1, 2, 3)), ((1,), (1, 0)),
                                         ((2, 2), (2, 1, 2, 1))])
def test_lower_completion(cw, expected):
    assert lower_completion(cw) == expected


def test_labels_that_are_not_distances_are_detected():
    m = HalfEdgeMap(Perm.identity([1, 2]), EDGE)
    one, two = m.vertices.cycles()
    with pytest.raises(StructureError):
        distances(SuitablyLabelledMap.from_vertex_labels(m, {one: 0, two: 2}))


@given(relabelled_theta())
def test_bijection_on_relabelled_profiles(theta):
    tally = verify_theta(theta, oracle.enumerate_suitably_labelled(theta))
    assert not [k for k in tally if k.endswith("-fail")], tally


@given(relabelled_theta(max_n=6).filter(lambda t: len(t) % 2 == 0))
def test_count_refinement_by_non_minima(theta):
    n = len(theta)
    by_length = Counter()
    for gamma, sigma in configurations(theta):
        by_length[sigma.length()] += 1
    maps = oracle.enumerate_suitably_labelled(theta)
    by_vertices = Counter(n // 2 - len(m.non_minima()) for m in maps)
    assert by_length == by_vertices
    table = bracket_table(theta)
    assert {p: c for (p, q), c in table.items() if q == 0} == dict(by_length)
