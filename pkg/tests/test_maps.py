
import pytest
from hypothesis import given, strategies as st

from betamaps.maps import (FlaggedMap, HalfEdgeMap, Hypermap, StructureError, euler_genus, faces,
                           flagged_euler, flagged_faces, is_orientable, lift_flagged,
                           project_covering, verify_orientation_reversing)
from betamaps.perms import Perm, enumerate_matchings

NO_MAP = FlaggedMap(
    Perm.parse("(1,2')(2,1')(3,8')(8,3')(4,5')(5,4')(6,9')(9,6')(7,10')(10,7')"),
    Perm.parse("(1,1')(2,2')(3,3')(4,4')(5,5')(6,9)(7,7')(8,8')(6',9')(10,10')"),
    Perm.parse("(1,5')(2,10')(3,2')(4,8')(5,4')(6,1')(7,9')(8,6')(9,7')(10,3')"),
)


def flag_triples(n_flags):
    """Connected triples with a fixed tau; every map on n_flags flags has such a labelling."""
    ms = list(enumerate_matchings(range(1, n_flags + 1)))
    t = ms[0]
    for r in ms:
        edge = t * r
        if edge != r * t or not edge.is_matching():
            continue  # edges are orbits of four flags
        for m in ms:
            fm = FlaggedMap(t, r, m)
            if fm.is_connected():
                yield fm


def two_colourable(fm):
    colour = {}
    for start in fm.flags:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for g in (fm.tau, fm.rho, fm.mu):
                y = g(x)
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    return False
    return True


SMALL_TRIPLES = list(flag_triples(4)) + list(flag_triples(8))


def test_faces_of_printed_hypermap():
    h = Hypermap(Perm.parse("(1,2,10)(3,4,5)(6,7)(8,9)"), Perm.parse("(1)(2,3)(4,9,6,5)(7,8,10)"))
    assert faces(h) == Perm.parse("(1,10,9,3)(2,5,7)(4)(6,8)")
    assert euler_genus(h) == 0


def test_trivial_faces_and_single_edge():
    assert faces(Hypermap(Perm.identity([1]), Perm.identity([1]))) == Perm.identity([1])
    edge = HalfEdgeMap(Perm.identity([1, 2]), Perm.parse("(1,2)"))
    assert edge.faces() == Perm.parse("(1,2)")
    assert edge.genus() == 0


def test_one_vertex_torus():
    m = HalfEdgeMap(Perm.parse("(1,2,3,4)"), Perm.parse("(1,3)(2,4)"))
    assert m.genus() == 1


def test_disconnected_hypermap_rejected():
    with pytest.raises(StructureError):
        euler_genus(Hypermap(Perm.identity([1, 2]), Perm.identity([1, 2])))


def test_hypermap_json_round_trip():
    h = Hypermap(Perm.parse("(1,2,10)(3,4,5)(6,7)(8,9)"), Perm.parse("(1)(2,3)(4,9,6,5)(7,8,10)"))
    assert Hypermap.from_json(h.to_json()) == h


def test_printed_nonorientable_map_is_projective():
    assert not is_orientable(NO_MAP)
    assert flagged_euler(NO_MAP) == 1
    cover, inv = lift_flagged(NO_MAP)
    assert len(cover.half_edges) == 20
    assert cover.genus() == 0
    assert project_covering(cover, inv) == NO_MAP


def test_planar_single_edge_flag_model():
    found = [fm for fm in flag_triples(4) if fm.counts() == (2, 1, 1)]
    assert found and all(is_orientable(fm) and flagged_euler(fm) == 2 for fm in found)


def test_projective_loop_flag_model_and_its_lift():
    loops = [fm for fm in flag_triples(4) if fm.counts() == (1, 1, 1)]
    assert loops
    for fm in loops:
        assert not is_orientable(fm) and flagged_euler(fm) == 1
        cover, inv = lift_flagged(fm)
        assert cover.genus() == 0
        assert cover.vertices.num_cycles() == 2 and cover.faces().num_cycles() == 2
        assert project_covering(cover, inv) == fm


def test_lifting_orientable_map_fails():
    orientable = next(fm for fm in flag_triples(4) if is_orientable(fm))
    with pytest.raises(StructureError):
        lift_flagged(orientable)


def test_four_cycle_sphere_has_one_reversing_matching():
    m = HalfEdgeMap.from_faces(Perm.parse("(1,2,3,4)(4',3',2',1')"),
                               Perm.parse("(1,3')(2,4')(3,1')(4,2')"))
    assert m.genus() == 0 and m.vertices.num_cycles() == 4
    valid = [inv for inv in enumerate_matchings(m.half_edges) if verify_orientation_reversing(m, inv)[0]]
    assert valid == [Perm.parse("(1,1')(2,2')(3,3')(4,4')")]
    fm = project_covering(m, valid[0])
    assert flagged_euler(fm) == 1 and not is_orientable(fm)
    assert lift_flagged(fm) == (m, valid[0])


def test_failing_matchings_are_reported():
    m = HalfEdgeMap.from_faces(Perm.parse("(1,2)(2',1')"), Perm.parse("(1,1')(2,2')"))
    ok, problems = verify_orientation_reversing(m, Perm.parse("(1,2)(1',2')"))
    assert not ok and problems
    with pytest.raises(StructureError):
        project_covering(m, Perm.parse("(1,2)(1',2')"))


def test_face_fixing_matching_is_flagged():
    m = HalfEdgeMap.from_faces(Perm.parse("(1,2)(1',2')"), Perm.parse("(1,2')(2,1')"))
    ok, problems = verify_orientation_reversing(m, Perm.parse("(1,2)(1',2')"))
    assert not ok and "fixed-face" in problems


def test_orientability_matches_bipartite_flag_graph():
    assert all(is_orientable(fm) == two_colourable(fm) for fm in SMALL_TRIPLES)


def test_lift_doubles_counts_and_projects_back():
    for fm in SMALL_TRIPLES:
        if two_colourable(fm):
            continue
        cover, inv = lift_flagged(fm)
        assert cover.is_connected()
        v, e, f = fm.counts()
        assert (cover.vertices.num_cycles(), cover.edges.num_cycles(),
                cover.faces().num_cycles()) == (2 * v, 2 * e, 2 * f)
        assert cover.euler_characteristic() == 2 * flagged_euler(fm)
        assert project_covering(cover, inv) == fm


@given(st.sampled_from(SMALL_TRIPLES))
def test_face_cycles_pair_up_under_rho(fm):
    phi = flagged_faces(fm)
    for cyc in phi.cycles():
        mirror = tuple(fm.rho(x) for x in reversed(cyc))
        assert set(mirror) != set(cyc)
        assert phi.cycle_of(mirror[0]) in {mirror[i:] + mirror[:i] for i in range(len(mirror))}


@given(st.integers(1, 4), st.data())
def test_connected_hypermaps_have_even_euler_characteristic(n, data):
    theta = Perm(dict(zip(range(1, n + 1), data.draw(st.permutations(range(1, n + 1))))))
    sigma = Perm(dict(zip(range(1, n + 1), data.draw(st.permutations(range(1, n + 1))))))
    h = Hypermap(theta, sigma)
    if h.is_connected():
        assert euler_genus(h) >= 0
