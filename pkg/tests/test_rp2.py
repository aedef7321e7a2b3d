from collections import Counter

import pytest
from hypothesis import given, strategies as st

from betamaps import oracle
from betamaps.maps import (HalfEdgeMap, SuitablyLabelledMap, flagged_euler, is_orientable,
                           verify_orientation_reversing)
from betamaps.perms import Perm
from betamaps.rp2 import (PathSeq, PreconditionError, apply_flips, close_slit, equilibrium_loop,
                          flip_vectors, from_projective, glue_mirror, is_good_loop, is_good_path,
                          is_good_trace, leftmost_geodesic, leftmost_good_geodesic, mirror,
                          open_slit, path_key, phi1, phi1_inverse, phi2, phi2_preimages,
                          projective_flips, root_half_edge, slit_and_glue, to_projective,
                          verify_theta)

EDGE = Perm.parse("(1,2)")


def labelled(vertices, edges, labels):
    m = HalfEdgeMap(Perm.parse(vertices), Perm.parse(edges))
    return SuitablyLabelledMap.from_vertex_labels(m, {m.vertices.cycle_of(k): v for k, v in labels.items()})


FLAT_EDGE = labelled("(1)(2)", "(1,2)", {1: 0, 2: 0})
TILTED_EDGE = labelled("(1)(2)", "(1,2)", {1: 0, 2: 1})
PATH_010 = labelled("(1)(2,3)(4)", "(1,2)(3,4)", {1: 0, 2: 1, 4: 0})
SQUARE = labelled("(1,8)(2,3)(4,5)(6,7)", "(1,2)(3,4)(5,6)(7,8)", {1: 0, 2: 1, 4: 1, 6: 1})


def two_minima_maps(theta):
    return oracle.enumerate_suitably_labelled(theta, oracle.planar_two_minima)


@st.composite
def relabelled_even_theta(draw, max_n=4):
    n = draw(st.sampled_from(range(2, max_n + 1, 2)))
    images = draw(st.permutations(range(1, n + 1)))
    return Perm(dict(zip(range(1, n + 1), images)))


def test_printed_label_traces():
    assert is_good_trace((0, 1, 2, 2, 1, 0))
    assert not is_good_trace((0, 1, 2, 3, 2, 3, 2, 1, 0))


def test_single_flat_edge_is_good():
    assert is_good_trace((0, 0))
    assert is_good_path(FLAT_EDGE, PathSeq.of(1, 2))


def test_slit_of_flat_edge():
    bm = open_slit(FLAT_EDGE, PathSeq.of(1, 2))
    assert bm.face == tuple(Perm.parse("(1',2')").universe)
    assert bm.map.map.faces() == Perm.parse("(1,2)(1',2')")
    assert is_good_loop(bm.map, bm.boundary_loop())
    assert close_slit(bm) == FLAT_EDGE


def test_slit_of_two_edge_path_closes_back():
    bm = open_slit(PATH_010, PathSeq.of(1, 2, 3, 4))
    assert bm.map.map.edges.is_matching()
    assert bm.map.is_suitable()
    assert is_good_loop(bm.map, bm.boundary_loop())
    assert close_slit(bm) == PATH_010


def test_slit_along_bad_path_fails():
    triangle = labelled("(1,6)(2,3)(4,5)", "(1,2)(3,4)(5,6)", {1: 0, 2: 0, 4: 1})
    assert triangle.is_suitable()
    with pytest.raises(PreconditionError):
        open_slit(triangle, PathSeq.of(1, 2, 3, 4))


def test_mirror_of_edge_and_involution():
    image = mirror(TILTED_EDGE)
    assert all(x.barred for x in image.map.half_edges)
    assert sorted(image.labels.values()) == [0, 1]
    assert mirror(image) == TILTED_EDGE


def test_mirror_vertex_identity():
    bm = open_slit(PATH_010, PathSeq.of(1, 2, 3, 4))
    m, image = bm.map.map, mirror(bm.map).map
    bar = lambda p: Perm({x.bar(): y.bar() for x, y in p.items()})
    sigma_bar = Perm({y.bar(): x.bar() for x, y in m.vertices.items()})
    alpha_bar = bar(m.edges)
    assert image.vertices == alpha_bar * sigma_bar * alpha_bar.inverse()


def test_glued_flat_edge():
    glued, inv = glue_mirror(open_slit(FLAT_EDGE, PathSeq.of(1, 2)))
    assert glued.map.faces() == Perm.parse("(1,2)(1',2')")
    assert glued.map.genus() == 0
    assert set(glued.labels.values()) == {0}
    assert verify_orientation_reversing(glued.map, inv)[0]
    loop = equilibrium_loop(glued, inv)
    assert loop.crossings == 2 and len(loop.loop) == 2


def test_geodesics_on_small_maps():
    g = leftmost_good_geodesic(PATH_010)
    assert g.path == PathSeq.of(1, 2, 3, 4) and g.start == g.full.vertices(PATH_010)[0]
    assert leftmost_good_geodesic(FLAT_EDGE).path == PathSeq.of(1, 2)
    with pytest.raises(PreconditionError):
        leftmost_good_geodesic(TILTED_EDGE)


def test_square_tie_break_picks_leftmost():
    root = root_half_edge(SQUARE)
    target = SQUARE.vertex_of(4)
    candidates = [PathSeq.of(1, 2, 3, 4), PathSeq.of(8, 7, 6, 5)]
    chosen = leftmost_geodesic(SQUARE, root, target)
    assert chosen in candidates
    assert path_key(SQUARE, root, chosen) == min(path_key(SQUARE, root, c) for c in candidates)


def test_flat_edge_to_projective_and_back():
    fm = to_projective(FLAT_EDGE)
    assert fm.counts() == (1, 1, 1)
    assert fm.faces() == Perm.parse("(1,2)(1',2')")
    assert fm.point is not None
    assert flagged_euler(fm) == 1 and not is_orientable(fm)
    assert from_projective(fm, "") == FLAT_EDGE


def test_four_cycle_images_are_distinct():
    theta = Perm.parse("(1,2,3,4)")
    maps = two_minima_maps(theta)
    assert len(maps) == 10
    assert len({to_projective(m) for m in maps}) == 10


@pytest.mark.parametrize("theta", ["(1,2)", "(1,2,3,4)", "(1,2)(3,4)"])
def test_fibers_and_round_trips(theta):
    theta = Perm.parse(theta)
    fiber = 2 ** (theta.num_cycles() - 1)
    for m in two_minima_maps(theta):
        base = to_projective(m)
        images = {to_projective(m, f) for f in flip_vectors(base)}
        assert len(images) == fiber
        for fm in images:
            assert from_projective(fm) == m
            assert to_projective(from_projective(fm), projective_flips(fm)) == fm
            assert all(from_projective(fm, f) == m for f in flip_vectors(fm))


def test_flips_are_involutive():
    theta = Perm.parse("(1,2)(3,4)")
    for m in two_minima_maps(theta):
        fm = to_projective(m)
        for f in flip_vectors(fm):
            assert apply_flips(apply_flips(fm, f), f) == fm


@pytest.mark.parametrize("theta", ["(1,2)", "(1,2,3,4)", "(1,2)(3,4)"])
def test_counting_identity(theta):
    theta = Perm.parse(theta)
    n, l = len(theta), theta.num_cycles()
    projective = len(oracle.enumerate_flagged_rp2(theta))
    assert (1 + n // 2 - l) * projective == 2 ** (l - 1) * len(two_minima_maps(theta))


def test_phi_counts_on_four_cycle():
    theta = Perm.parse("(1,2,3,4)")
    one = [m for m in oracle.enumerate_suitably_labelled(theta) if len(m.local_minima()) == 1]
    two = oracle.enumerate_suitably_labelled(theta, oracle.two_minima)
    zero_count = lambda m: sum(m.label(v) == 0 for v in m.vertex_cycles())
    plus, flat = Counter(), Counter()
    n_plus = n_flat = 0
    for m in one:
        low = m.vertex_of(m.local_minima()[0][0])
        for v in m.vertex_cycles():
            if m.vertex_of(v[0]) == low:
                continue
            n_flat += 1
            flat[phi2(m, v)] += 1
            for k in range(1, m.label(v)):
                n_plus += 1
                image = phi1(m, v, k)
                plus[image] += 1
                assert phi1_inverse(image) == (m, m.vertex_of(v[0]), k)
    assert set(plus) == {m for m in two if zero_count(m) == 1} and n_plus == len(plus)
    assert set(flat) == {m for m in two if zero_count(m) == 2} and set(flat.values()) == {2}
    assert n_flat == 2 * len(flat)


def test_phi2_on_tilted_edge():
    top = TILTED_EDGE.vertex_of(2)
    assert phi2(TILTED_EDGE, top) == FLAT_EDGE
    pre = phi2_preimages(FLAT_EDGE)
    assert len(pre) == 2 and {v for _, v in pre} == set(map(tuple, FLAT_EDGE.vertex_cycles()))
    assert all(phi2(m, v) == FLAT_EDGE for m, v in pre)


def test_phi1_range_checked():
    with pytest.raises(PreconditionError):
        phi1(TILTED_EDGE, TILTED_EDGE.vertex_of(2), 1)


@given(st.lists(st.integers(0, 3), min_size=2, max_size=9))
def test_good_traces_have_two_equal_end_minima(trace):
    if is_good_trace(trace):
        assert trace[0] == trace[-1] == min(trace)


@given(relabelled_even_theta())
def test_correspondence_on_relabelled_profiles(theta):
    maps = two_minima_maps(theta)
    tally = verify_theta(theta, maps, oracle.enumerate_flagged_rp2(theta, pointed=True))
    assert not [k for k in tally if k.endswith("-fail")], tally


@given(relabelled_even_theta())
def test_slit_and_glue_doubles_planar_maps(theta):
    for m in two_minima_maps(theta):
        glued, inv, chosen, opened = slit_and_glue(m)
        assert glued.map.genus() == 0 and glued.is_suitable()
        assert verify_orientation_reversing(glued.map, inv)[0]
        assert close_slit(opened) == m
        loop = equilibrium_loop(glued, inv)
        assert loop.crossings % 2 == 0
