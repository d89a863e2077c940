import json
from itertools import permutations

import pytest

from bierlab.errors import CenterNotFace, InputNotCertified, NotCoatoms, Timeout
from bierlab.poset import boolean_lattice, chain, order_complex, proper_part
from bierlab.shelling import (
    FacetOrdering,
    bier_shelling_pipeline,
    check_condition_S,
    check_condition_T,
    check_recursive_coatom_ordering,
    check_shelling_order,
    find_recursive_coatom_ordering,
    find_shelling,
    is_shellable_bruteforce,
    is_shelling_bruteforce,
    replay_certificate,
    transport_data,
    transport_ordering,
)
from bierlab.simplicial import cycle, face_lattice, from_facets, full_simplex, simplex_boundary

S = frozenset


def test_triangle_boundary_any_order():
    K = simplex_boundary([1, 2, 3])
    L = face_lattice(K)
    for order in permutations(K.facets):
        assert check_condition_T(L, order)
        assert check_condition_S(L, order)
        assert check_recursive_coatom_ordering(L, order)


def test_two_triangles_sharing_vertex_fail_at_1_2():
    K = from_facets([[1, 2, 3], [3, 4, 5]])
    L = face_lattice(K)
    for order in permutations(K.facets):
        chk = check_condition_T(L, order)
        assert not chk and chk.counterexample == (1, 2)
        assert not check_condition_S(L, order)
    assert find_shelling(K) is None
    assert not is_shellable_bruteforce(K)


def test_single_facet_vacuous():
    K = full_simplex([1, 2, 3])
    assert check_condition_T(face_lattice(K), K.facets)


def test_two_element_poset_is_rco():
    assert check_recursive_coatom_ordering(chain(2), [1])


def test_not_coatoms_rejected():
    L = face_lattice(simplex_boundary([1, 2, 3]))
    with pytest.raises(NotCoatoms):
        check_condition_T(L, [S({1, 2})])


def test_find_shelling_examples():
    assert find_shelling(simplex_boundary([1, 2, 3, 4])) is not None
    hexagon = order_complex(proper_part(boolean_lattice(3)))
    rep = find_shelling(hexagon)
    assert rep is not None and rep.replay()
    assert is_shelling_bruteforce(rep.ordering.facets)


def test_find_shelling_is_lexicographically_first():
    K = cycle([1, 2, 3, 4])
    rep = find_shelling(K)
    assert rep.ordering.facets[0] == K.facets[0]
    for order in permutations(K.facets):
        if is_shelling_bruteforce(order):
            assert [K.facets.index(f) for f in order] >= [K.facets.index(f) for f in rep.ordering.facets]


def test_nonpure_shelling():
    # an edge hanging off a triangle is shellable with the triangle first
    K = from_facets([[1, 2, 3], [3, 4]])
    assert check_shelling_order([S({1, 2, 3}), S({3, 4})])
    assert not check_shelling_order([S({3, 4}), S({1, 2, 3})])
    assert find_shelling(K) is not None


def test_replay_rejects_tampered_witness():
    rep = find_shelling(simplex_boundary([1, 2, 3, 4]))
    rep.witnesses[2] = {0: 2, 1: 1}
    assert not rep.replay()


def test_timeout():
    with pytest.raises(Timeout):
        find_shelling(simplex_boundary(range(6)), timeout=0)


def test_rco_found_matches_t_on_small_lattice():
    L = face_lattice(cycle([1, 2, 3, 4]))
    order = find_recursive_coatom_ordering(L)
    assert order is not None and check_condition_T(L, order)


def test_transport_full_triangle():
    K = full_simplex([1, 2, 3])
    out = transport_ordering(K, K.facets, {1, 2}, "v")
    assert out.facets == [S({1, 3, "v"}), S({2, 3, "v"})]
    assert out.certificate == {S({1, 3, "v"}): {"mf": 1, "A": 1}, S({2, 3, "v"}): {"mf": 1, "A": 1}}
    assert check_shelling_order(out.facets)


def test_transport_at_a_facet():
    K = simplex_boundary([1, 2, 3, 4])
    order = find_shelling(K).ordering
    for j, F in enumerate(order.facets):
        out = transport_ordering(K, order, F, "v")
        blown = [f for f in out.facets if "v" in f]
        assert {f - {"v"} for f in blown} == {F - {w} for w in F}
        kept = [f for f in out.facets if "v" not in f]
        assert kept == [f for f in order.facets if f != F]


def test_a_never_exceeds_mf():
    K = from_facets([[1, 2, 3], [2, 3, 4], [3, 4, 5], [1, 5]])
    order = find_shelling(K).ordering
    for alpha in K.faces:
        if alpha:
            data = transport_data(order.facets, alpha)
            assert all(data.A[G] <= data.mf[G] for G in data.C)


def test_transport_input_validation():
    K = from_facets([[1, 2, 3], [3, 4, 5]])
    with pytest.raises(InputNotCertified):
        transport_ordering(K, K.facets, {3})
    tri = full_simplex([1, 2, 3])
    with pytest.raises(CenterNotFace):
        transport_ordering(tri, tri.facets, {4})
    with pytest.raises(InputNotCertified):
        transport_ordering(tri, [], {1})


def test_certificate_replay():
    K = cycle([1, 2, 3, 4, 5])
    order = find_shelling(K).ordering
    out = transport_ordering(K, order, {1, 2}, "v")
    assert replay_certificate(K, order, {1, 2}, "v", out)
    bad = FacetOrdering(out.facets, {f: {"mf": 9, "A": 9} for f in out.certificate})
    assert not replay_certificate(K, order, {1, 2}, "v", bad)


def test_certificate_json_is_plain():
    K = full_simplex([1, 2, 3])
    out = transport_ordering(K, K.facets, {1, 2}, "v")
    doc = json.loads(json.dumps(out.to_json()))
    assert doc["order"] == [[1, 3, "v"], [2, 3, "v"]]
    assert set(doc["certificate"]["mf"].values()) == {1}


def test_pipeline_b3():
    rep = bier_shelling_pipeline(boolean_lattice(3), [S(), S({1})])
    assert len(rep.steps) == 2
    assert rep.complex.f_vector() == (1, 8, 8)
    assert rep.replay()


def test_pipeline_b2_zero_steps():
    for ideal in ([S()], [S(), S({1})], [S(), S({1}), S({2})]):
        rep = bier_shelling_pipeline(boolean_lattice(2), ideal)
        assert rep.steps == [] and rep.complex.f_vector() == (1, 2)


def test_pipeline_b4_is_two_sphere():
    K = from_facets([[1, 2], [3]])
    rep = bier_shelling_pipeline(boolean_lattice(4), K.faces)
    assert rep.replay()
    assert rep.complex.reduced_homology().is_sphere(2)


def test_pipeline_on_face_lattice_of_path():
    K = from_facets([[1, 2], [2, 3]])
    rep = bier_shelling_pipeline(face_lattice(K), [S(), S({2})])
    assert set(rep.ordering.facets) == set(rep.complex.facets)
    assert check_shelling_order(rep.ordering.facets)
    assert rep.replay()
