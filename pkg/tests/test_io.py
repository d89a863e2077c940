import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bierlab.bier import bier_poset
from bierlab.io import (
    complex_from_json,
    complex_to_json,
    dumps,
    ideal_from_json,
    ideal_to_json,
    parse_set_family,
    poset_from_json,
    poset_to_json,
)
from bierlab.labels import TOP, Blown, Interval, Plain, Primed, label_from_json, label_to_json
from bierlab.nested import bier_subdivision_chain, combinatorial_blowup
from bierlab.poset import boolean_lattice
from bierlab.simplicial import SimplicialComplex, deleted_join_bier, from_facets

S = frozenset


def test_parse_set_family():
    assert parse_set_family("∅,{1},{1,2}") == [S(), S({1}), S({1, 2})]
    assert parse_set_family("{}, {a, b}") == [S(), S({"a", "b"})]
    assert parse_set_family("") == []
    with pytest.raises(ValueError):
        parse_set_family("{1},2")


def test_poset_round_trip():
    for P in [
        boolean_lattice(3),
        bier_poset(boolean_lattice(3), [S(), S({1})]),
        combinatorial_blowup(boolean_lattice(3), S({2, 3})),
    ]:
        doc = poset_to_json(P)
        assert poset_from_json(doc) == P
        assert dumps(poset_to_json(poset_from_json(doc))) == dumps(doc)


def test_complex_round_trip():
    for K in [
        SimplicialComplex.void(),
        SimplicialComplex([S()]),
        deleted_join_bier(from_facets([[1], [2]]), 3),
        bier_subdivision_chain(boolean_lattice(3), [S(), S({1})]).final,
    ]:
        assert complex_from_json(complex_to_json(K)) == K


def test_declared_vertices_must_match():
    with pytest.raises(ValueError):
        complex_from_json({"facets": [[1, 2]], "vertices": [1, 2, 3]})


def test_ideal_round_trip():
    I = S([S(), S({1}), S({2})])
    assert ideal_from_json(ideal_to_json(I)) == I


labels = st.recursive(
    st.integers(-5, 5) | st.text("abc", min_size=1, max_size=3),
    lambda inner: st.frozensets(inner, max_size=3)
    | st.tuples(inner, inner)
    | st.builds(Interval, inner, inner)
    | st.builds(Plain, inner)
    | st.builds(Blown, inner, inner)
    | st.builds(Primed, st.integers(1, 5))
    | st.just(TOP),
    max_leaves=6,
)


@settings(max_examples=150, deadline=None)
@given(labels)
def test_label_round_trip(x):
    assert label_from_json(label_to_json(x)) == x
