"""Bier posets of bounded posets and the boolean-case deleted join."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import IsomorphismFailed, NotBounded, NotProper
from .labels import TOP, Interval, Primed
from .poset import Poset, bits, boolean_lattice, is_isomorphism, poset_isomorphism
from .simplicial import SimplicialComplex, deleted_join_bier, face_lattice

BierElement = Interval  # or TOP


def bier_poset(P: Poset, ideal: Iterable) -> Poset:
    """``Bier(P, I)``: intervals ``[x, y]`` with x ∈ I, y ∉ I under reverse inclusion, plus TOP."""
    b = P.bounds()
    if b is None:
        raise NotBounded("Bier construction needs a bounded poset")
    ideal = P.check_proper_ideal(ideal)
    in_ideal = P._mask(ideal)
    outside = ((1 << len(P)) - 1) & ~in_ideal
    pairs = []
    for i in bits(in_ideal):
        for j in bits(P._up[i] & outside):
            pairs.append((i, j))
    elems = [Interval(P.elements[i], P.elements[j]) for i, j in pairs] + [TOP]
    # [x,y] <= [v,w]  iff  x <= v and w <= y
    down_p, up_p = P._down, P._up

    def leq(a, c):
        if c is TOP:
            return True
        if a is TOP:
            return False
        x, y = P.index[a.lo], P.index[a.hi]
        v, w = P.index[c.lo], P.index[c.hi]
        return bool(down_p[v] >> x & 1) and bool(up_p[w] >> y & 1)

    return Poset.from_leq(elems, leq)


def bier_proper_size(P: Poset, ideal: Iterable) -> int:
    """``#{(x, y): x ∈ I, y ∉ I, x < y} - 1``, counted directly from the order."""
    ideal = frozenset(ideal)
    return sum(
        1 for x in ideal for y in P.elements if y not in ideal and P.lt(x, y)
    ) - 1


def ideal_of_complex(K: SimplicialComplex) -> frozenset:
    """Faces of ``K`` as an ideal of the boolean lattice."""
    return frozenset(K.faces)


def canonical_boolean_map(n: int, K: SimplicialComplex) -> dict:
    """Face ``σ ⊎ τ'`` of Bier_n(K) ↦ interval ``[σ, [n] \\ τ]``; TOP ↦ TOP."""
    ground = frozenset(range(1, n + 1))
    J = deleted_join_bier(K, n)
    out = {TOP: TOP}
    for face in J.faces:
        sigma = frozenset(v for v in face if not isinstance(v, Primed))
        tau = frozenset(v.base for v in face if isinstance(v, Primed))
        out[face] = Interval(sigma, ground - tau)
    return out


@dataclass
class BooleanBierReport:
    n: int
    ideal: frozenset
    witness: dict
    canonical: bool
    size: int

    def to_json(self) -> dict:
        return {"n": self.n, "elements": self.size, "canonical_map": self.canonical}


def verify_boolean_bier(K: SimplicialComplex, n: int, search: bool = False) -> BooleanBierReport:
    """Check ``face_lattice(Bier_n(K)) ≅ Bier(B_n, I_K)`` and return the witness.

    The interval map ``σ ⊎ τ' ↦ [σ, [n] \\ τ]`` is validated first; with
    ``search=True`` (or if that map fails) a generic isomorphism search is run.
    """
    if K.is_void():
        raise NotProper("K must be nonempty")
    Bn = boolean_lattice(n)
    ideal = ideal_of_complex(K)
    lhs = face_lattice(deleted_join_bier(K, n))
    rhs = bier_poset(Bn, ideal)
    canonical = False
    witness = None
    if not search:
        f = canonical_boolean_map(n, K)
        if is_isomorphism(lhs, rhs, f):
            witness, canonical = f, True
    if witness is None:
        witness = poset_isomorphism(lhs, rhs)
    if witness is None:
        raise IsomorphismFailed(
            f"face lattice of Bier_{n}(K) is not isomorphic to Bier(B_{n}, I)",
            witness=(len(lhs), len(rhs)),
        )
    if not is_isomorphism(lhs, rhs, witness):
        raise IsomorphismFailed("isomorphism search returned an invalid map", witness=witness)
    return BooleanBierReport(n, ideal, witness, canonical, len(lhs))
