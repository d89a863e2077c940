import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from bierlab.errors import FaceNotPresent, NotDownwardClosed, NotProper, TooLarge
from bierlab.homology import diagonalize, invariant_factors
from bierlab.labels import Primed
from bierlab.poset import boolean_lattice, poset_isomorphism
from bierlab.simplicial import (
    SimplicialComplex,
    alexander_dual,
    complex_isomorphism,
    cycle,
    deleted_join_bier,
    face_lattice,
    face_poset,
    from_facets,
    full_simplex,
    is_pseudomanifold,
    simplex_boundary,
    stellar_subdivision,
)

from families import all_complexes, random_complex

S = frozenset


def test_from_facets_examples():
    assert from_facets([[1, 2, 3]]).num_faces() == 8
    assert from_facets([]).num_faces() == 0
    K = from_facets([[1, 2], [2, 3]])
    assert K.faces == {S(), S({1}), S({2}), S({3}), S({1, 2}), S({2, 3})}


def test_rejects_non_closed_family():
    with pytest.raises(NotDownwardClosed):
        SimplicialComplex([S(), S({1, 2})])


def test_alexander_dual_examples():
    assert alexander_dual(SimplicialComplex([S()]), [1, 2]).faces == {S(), S({1}), S({2})}
    assert alexander_dual(full_simplex([1, 2, 3]), [1, 2, 3]).is_void()
    pts = from_facets([[1], [2], [3]])
    assert alexander_dual(pts, [1, 2, 3]) == pts


def alexander_dual_oracle(K, n):
    ground = S(range(1, n + 1))
    subsets = [S(c) for r in range(n + 1) for c in combinations(sorted(ground), r)]
    return {ground - s for s in subsets if s not in K.faces}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_alexander_dual_brute_force(n):
    for K in all_complexes(n):
        A = alexander_dual(K, range(1, n + 1))
        assert set(A.faces) == alexander_dual_oracle(K, n)


def test_alexander_dual_is_involution():
    for K in all_complexes(3):
        if K.faces == set(full_simplex([1, 2, 3]).faces):
            continue
        assert alexander_dual(alexander_dual(K, [1, 2, 3]), [1, 2, 3]) == K


def deleted_join_oracle(K, n):
    A = alexander_dual_oracle(K, n)
    return {
        S(s) | S(Primed(i) for i in t)
        for s in K.faces
        for t in A
        if not s & t
    }


def test_deleted_join_three_points_is_hexagon():
    J = deleted_join_bier(from_facets([[1], [2], [3]]), 3)
    assert set(J.faces) == deleted_join_oracle(from_facets([[1], [2], [3]]), 3)
    assert J.f_vector() == (1, 6, 6)
    assert J.reduced_homology().is_sphere(1)


def test_deleted_join_of_empty_face_is_simplex_boundary():
    J = deleted_join_bier(SimplicialComplex([S()]), 3)
    assert J == simplex_boundary([Primed(1), Primed(2), Primed(3)])


def test_deleted_join_n2_point():
    K = SimplicialComplex([S(), S({1})])
    J = deleted_join_bier(K, 2)
    # A(K) = {∅,{1}}: the two vertices 1 and 1' cannot be joined
    assert set(J.faces) == {S(), S({1}), S({Primed(1)})}
    assert J.reduced_homology().is_sphere(0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_deleted_join_vertex_bound(n):
    for K in all_complexes(n):
        if len(K.faces) == 2 ** n:
            with pytest.raises(NotProper):
                deleted_join_bier(K, n)
            continue
        J = deleted_join_bier(K, n)
        if n <= 3:
            assert set(J.faces) == deleted_join_oracle(K, n)
        assert len(J.vertices) <= 2 * n


def test_stellar_examples():
    tri = full_simplex([1, 2, 3])
    assert set(stellar_subdivision(tri, {1, 2}, "v").facets) == {S({1, 3, "v"}), S({2, 3, "v"})}
    assert set(stellar_subdivision(tri, {1, 2, 3}, "v").facets) == {
        S({1, 2, "v"}),
        S({1, 3, "v"}),
        S({2, 3, "v"}),
    }
    renamed = stellar_subdivision(tri, {1}, "v")
    assert renamed == tri.relabel({1: "v", 2: 2, 3: 3})


def test_stellar_rejects_non_face():
    with pytest.raises(FaceNotPresent):
        stellar_subdivision(cycle([1, 2, 3]), {1, 2, 3}, "v")


def test_face_lattice_shapes():
    L = face_lattice(full_simplex([1, 2, 3]))
    assert len(L) == 9
    assert poset_isomorphism(L.without([S({1, 2, 3})]), boolean_lattice(3))
    pt = from_facets([[1]])
    assert len(face_poset(pt)) == 2 and len(face_lattice(pt)) == 3


def test_face_poset_meet_is_intersection():
    K = from_facets([[1, 2, 3], [3, 4], [2, 4, 5]])
    P = face_poset(K)
    for F in K.faces:
        for G in K.faces:
            assert P.meet(F, G) == F & G


def test_f_vectors_and_euler():
    hexagon = cycle(range(6))
    assert hexagon.f_vector() == (1, 6, 6) and hexagon.euler_characteristic() == 0
    tri = simplex_boundary([1, 2, 3])
    assert tri.f_vector() == (1, 3, 3) and tri.euler_characteristic() == 0
    assert full_simplex([1, 2, 3]).euler_characteristic() == 1


def test_h_vector_of_octahedron_boundary():
    octa = from_facets([[a, b, c] for a in "xX" for b in "yY" for c in "zZ"])
    assert octa.f_vector() == (1, 6, 12, 8)
    assert octa.h_vector() == (1, 3, 3, 1)


def test_homology_examples():
    assert cycle(range(6)).reduced_homology().betti == (0, 0, 1)
    H = simplex_boundary([1, 2, 3, 4]).reduced_homology()
    assert H.is_sphere(2) and H.betti[3] == 1


def test_homology_of_void_and_empty_face():
    assert SimplicialComplex([S()]).reduced_homology().is_sphere(-1)
    assert SimplicialComplex.void().reduced_homology().is_trivial()


def test_projective_plane_torsion():
    # six-vertex real projective plane
    facets = [
        [1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 2, 6],
        [2, 3, 5], [3, 4, 6], [2, 4, 5], [2, 4, 6], [3, 5, 6],
    ]
    H = from_facets(facets).reduced_homology()
    assert H.betti == (0, 0, 0, 0)
    assert H.torsion_in(1) == (2,)


def test_face_guard(monkeypatch):
    monkeypatch.setenv("BIERLAB_MAX_FACES", "10")
    with pytest.raises(TooLarge):
        simplex_boundary(range(5)).reduced_homology()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=1, max_size=5), min_size=1, max_size=5))
def test_invariant_factors_agree_with_sympy(rows):
    width = max(len(r) for r in rows)
    M = [r + [0] * (width - len(r)) for r in rows]
    ours = invariant_factors(diagonalize(M))
    theirs = [abs(int(x)) for x in sympy_invariant_factors(Matrix(M)) if x != 0]
    assert ours == theirs


def test_pseudomanifold():
    assert is_pseudomanifold(cycle(range(6)))[0]
    assert is_pseudomanifold(simplex_boundary(range(4)))[0]
    ok, reason = is_pseudomanifold(from_facets([[1, 2, 3], [3, 4, 5]]))
    assert not ok and reason


def test_complex_isomorphism():
    hexagon = cycle(range(6))
    other = cycle("abcdef")
    assert complex_isomorphism(hexagon, other) is not None
    two_triangles = from_facets([[1, 2, 3], [4, 5, 6]])
    assert complex_isomorphism(hexagon, two_triangles) is None
    tri = full_simplex([1, 2, 3])
    assert complex_isomorphism(tri, stellar_subdivision(tri, {1, 2})) is None


def test_stellar_random_matches_definition():
    rng = random.Random(11)
    for _ in range(200):
        K = random_complex(rng)
        F = rng.choice([f for f in K.faces if f])
        sd = stellar_subdivision(K, F, "v")
        expected = {G for G in K.faces if not F <= G}
        for G in K.faces:
            if F <= G:
                for H in K.faces:
                    if H <= G and not F <= H:
                        expected.add(H | {"v"})
        assert set(sd.faces) == expected
