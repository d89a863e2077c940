"""Building sets, nested set complexes and combinatorial blowups.

Also the Bier-specific pieces: the canonical building set in
``Bier(L, I)`` minus its top, the explicit identification of its nested set
complex with ``Δ(L̄)``, and the chain of edge subdivisions that turns
``Δ(L̄)`` into ``Δ(Bier(L, I)‾)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .bier import bier_poset
from .errors import (
    AlphaIsBottom,
    AlphaNotMaximal,
    NotBuildingSet,
    NotLattice,
    NotSemilattice,
    StepFailed,
    VerificationFailed,
)
from .labels import TOP, Blown, Interval, Plain, canon, label_to_json, sort_key, sorted_labels
from .poset import Poset, bits, order_complex
from .simplicial import SimplicialComplex, face_poset, stellar_subdivision

BlowupElement = Plain  # or Blown


# blowups


def combinatorial_blowup(L: Poset, alpha, validate: bool = True) -> Poset:
    """``Bl_alpha(L)`` on Plain(x) for x ≱ α and Blown(α, x) when also x ∨ α exists."""
    if not L.is_meet_semilattice():
        raise NotSemilattice("blowups are defined on meet-semilattices")
    a = L._idx(alpha)
    if not L._lower[a] and len(L.minimal()) == 1:
        raise AlphaIsBottom("cannot blow up the bottom element")
    n = len(L)
    above_alpha = L._up[a]
    keep = [i for i in range(n) if not above_alpha >> i & 1]
    blown = [i for i in keep if (L._up[i] & above_alpha) in L._by_up]
    elems = [Plain(L.elements[i]) for i in keep] + [Blown(alpha, L.elements[i]) for i in blown]
    src = [(0, i) for i in keep] + [(1, i) for i in blown]
    order = sorted(range(len(elems)), key=lambda k: sort_key(elems[k]))
    elems = tuple(elems[k] for k in order)
    src = [src[k] for k in order]
    down = []
    for kind_y, y in src:
        dy = L._down[y]
        d = 0
        for k, (kind_z, z) in enumerate(src):
            # Plain ≤ Plain, Blown ≤ Blown and Plain ≤ Blown all reduce to z ≤ y
            if dy >> z & 1 and kind_z <= kind_y:
                d |= 1 << k
        down.append(d)
    P = Poset._from_masks(elems, down)
    if validate and not P.is_meet_semilattice():
        raise VerificationFailed("blowup is not a meet-semilattice", witness=alpha)
    return P


# building sets


@dataclass(frozen=True)
class BuildingSet:
    host: Poset
    members: frozenset

    def __iter__(self):
        return iter(sorted_labels(self.members))

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class Check:
    """Outcome of a verification; truthy when it passed."""

    ok: bool
    counterexample: object = None

    def __bool__(self):
        return self.ok


def _maxes(L: Poset, mask: int) -> list[int]:
    return [i for i in bits(mask) if L._up[i] & mask == 1 << i]


def is_building_set(L: Poset, G: Iterable) -> Check:
    """Check the product decomposition of every lower interval via the canonical join map."""
    if not L.is_meet_semilattice():
        raise NotSemilattice("building sets are checked on meet-semilattices")
    bottom = L.bottom()
    G = frozenset(G)
    if bottom in G:
        raise ValueError("a building set may not contain the bottom element")
    gmask = L._mask(G)
    for x in L.linear_extension():
        if x == bottom or x in G:
            # x ∈ G: max G_{≤x} = {x} and the map is the identity
            continue
        ix = L._idx(x)
        maxes = _maxes(L, L._down[ix] & gmask)
        if not maxes or not _product_iso(L, maxes, ix):
            return Check(False, x)
    return Check(True)


def _product_iso(L: Poset, factors: list[int], x: int) -> bool:
    target = L._down[x]
    boxes = [sorted(bits(L._down[f])) for f in factors]
    image: dict[int, tuple] = {}
    for t in product(*boxes):
        mask = -1
        for g in t:
            mask &= L._up[g]
        j = L._by_up.get(mask)
        if j is None or j in image:
            return False
        image[j] = t
    if sum(1 << j for j in image) != target:
        return False
    psi = {t: j for j, t in image.items()}
    # forward monotone on covers of the product
    for t, j in psi.items():
        for k, g in enumerate(t):
            for c in bits(L._upper[g] & L._down[factors[k]]):
                s = t[:k] + (c,) + t[k + 1:]
                if not L._down[psi[s]] >> j & 1:
                    return False
    # inverse monotone on covers of [0, x]
    for u, tu in image.items():
        for l in bits(L._lower[u]):
            tl = image[l]
            if not all(L._down[b] >> a & 1 for a, b in zip(tl, tu)):
                return False
    return True


def is_nested(L: Poset, G: Iterable, N: Iterable) -> bool:
    """Every antichain of size ≥ 2 in ``N`` has a join in ``L`` lying outside ``G``."""
    G = frozenset(G)
    idx = sorted(L._idx(x) for x in N)
    gmask = L._mask(G)

    def antichains(start: int, chosen: list[int], up: int):
        for k in range(start, len(idx)):
            i = idx[k]
            if any(_comparable(L, i, c) for c in chosen):
                continue
            nu = up & L._up[i]
            if chosen:
                j = L._by_up.get(nu)
                if j is None or gmask >> j & 1:
                    return False
            chosen.append(i)
            if antichains(k + 1, chosen, nu) is False:
                return False
            chosen.pop()
        return True

    return antichains(0, [], -1)


def _comparable(L: Poset, i: int, j: int) -> bool:
    return bool(L._down[i] >> j & 1 or L._down[j] >> i & 1)


def nested_set_complex(L: Poset, G: Iterable) -> SimplicialComplex:
    """All nested subsets of ``G``, as a complex with vertex set ``G``."""
    G = frozenset(G)
    gmask = L._mask(G)
    order = sorted((L._idx(x) for x in G), key=lambda i: sort_key(L.elements[i]))
    faces = [frozenset()]

    def ok_with(S: list[int], g: int) -> bool:
        inc = [s for s in S if not _comparable(L, s, g)]

        def rec(start: int, up: int, chosen: list[int]) -> bool:
            for k in range(start, len(inc)):
                s = inc[k]
                if any(_comparable(L, s, c) for c in chosen):
                    continue
                nu = up & L._up[s]
                j = L._by_up.get(nu)
                if j is None or gmask >> j & 1:
                    return False
                chosen.append(s)
                if not rec(k + 1, nu, chosen):
                    return False
                chosen.pop()
            return True

        return rec(0, L._up[g], [])

    def grow(S: list[int], start: int):
        for k in range(start, len(order)):
            g = order[k]
            if ok_with(S, g):
                S.append(g)
                faces.append(frozenset(L.elements[i] for i in S))
                grow(S, k + 1)
                S.pop()

    grow([], 0)
    return SimplicialComplex(faces)


# Bier building set


def bier_host(L: Poset, ideal: Iterable) -> Poset:
    """``Bier(L, I)`` with its top removed; requires a lattice."""
    if not L.is_lattice():
        raise NotLattice("nested set machinery needs a lattice")
    return bier_poset(L, ideal).without([TOP])


def canonical_bier_building_set(L: Poset, ideal: Iterable, validate: bool = True) -> BuildingSet:
    """``{[0, y] : y ∈ L̄ \\ I} ∪ {[x, 1] : x ∈ I \\ {0}}`` inside Bier(L, I) minus top."""
    host = bier_host(L, ideal)
    ideal = frozenset(ideal)
    bottom, top = L.bottom(), L.top()
    members = frozenset(
        [Interval(bottom, y) for y in L.elements if y not in ideal and y != top]
        + [Interval(x, top) for x in ideal if x != bottom]
    )
    if validate:
        chk = is_building_set(host, members)
        if not chk:
            raise VerificationFailed("canonical Bier set is not a building set", chk.counterexample)
    return BuildingSet(host, members)


def nested_by_comparability(members: Iterable, L: Poset) -> bool:
    """Characterisation of nested sets in the Bier building set by comparability."""
    bottom, top = L.bottom(), L.top()
    lows = [e.lo for e in members if e.hi == top and e.lo != bottom]
    highs = [e.hi for e in members if e.lo == bottom]
    if any(not L.comparable(a, b) for a in highs for b in highs):
        return False
    if any(not L.comparable(a, b) for a in lows for b in lows):
        return False
    return all(L.lt(x, y) for x in lows for y in highs)


@dataclass
class ChainNestedReport:
    """Vertex bijection between N(G) and Δ(L̄) with both directions checked."""

    forward: dict  # building-set element -> element of L̄
    backward: dict
    nested: SimplicialComplex
    chains: SimplicialComplex

    def f(self, A: Iterable) -> frozenset:
        return frozenset(self.forward[a] for a in A)

    def f_inverse(self, S: Iterable) -> frozenset:
        return frozenset(self.backward[z] for z in S)


def chain_to_nested(L: Poset, ideal: frozenset, S: Iterable) -> frozenset:
    """``S_f``: the first ``i`` chain elements go to [z, 1], the rest to [0, z]."""
    bottom, top = L.bottom(), L.top()
    zs = sorted(S, key=lambda z: L._heights_below()[L.index[z]])
    i = max([j + 1 for j, z in enumerate(zs) if z in ideal] + [0])
    return frozenset([Interval(z, top) for z in zs[:i]] + [Interval(bottom, z) for z in zs[i:]])


def chain_nested_isomorphism(L: Poset, ideal: Iterable) -> ChainNestedReport:
    ideal = frozenset(ideal)
    G = canonical_bier_building_set(L, ideal)
    top = L.top()
    N = nested_set_complex(G.host, G.members)
    D = order_complex(L.proper_part()) if len(L) > 2 else SimplicialComplex([frozenset()])
    forward = {g: (g.lo if g.hi == top else g.hi) for g in G.members}
    backward = {z: g for g, z in forward.items()}
    if len(backward) != len(forward):
        raise VerificationFailed("vertex map is not injective")
    for A in N.faces:
        S = frozenset(forward[a] for a in A)
        if S not in D:
            raise VerificationFailed("f(A) is not a chain", witness=sorted_labels(A))
        if chain_to_nested(L, ideal, S) != A:
            raise VerificationFailed("S_f(f(A)) != A", witness=sorted_labels(A))
    for S in D.faces:
        A = chain_to_nested(L, ideal, S)
        if A not in N:
            raise VerificationFailed("S_f is not nested", witness=sorted_labels(S))
        if frozenset(forward[a] for a in A) != S:
            raise VerificationFailed("f(S_f) != S", witness=sorted_labels(S))
    if N.relabel(forward) != D:
        raise VerificationFailed("relabelled nested set complex differs from Δ(L̄)")
    return ChainNestedReport(forward, backward, N, D)


# extending a building set by one element


@dataclass
class ExtensionReport:
    alpha: object
    B: frozenset
    before: SimplicialComplex
    after: SimplicialComplex

    def to_json(self) -> dict:
        return {"alpha": canon(self.alpha), "B": [canon(b) for b in sorted_labels(self.B)]}


def extend_building_set(
    L: Poset, G: BuildingSet | Iterable, alpha, before: SimplicialComplex | None = None
) -> tuple[BuildingSet, ExtensionReport]:
    """Add a maximal non-building element and check ``F(N(G')) = Bl_B(F(N(G)))``."""
    members = frozenset(G.members if isinstance(G, BuildingSet) else G)
    if not isinstance(G, BuildingSet):
        chk = is_building_set(L, members)
        if not chk:
            raise NotBuildingSet(f"input set is not a building set (fails at {canon(chk.counterexample)})")
    ia = L._idx(alpha)
    if alpha in members:
        raise AlphaNotMaximal(f"{alpha!r} already belongs to the building set")
    rest = ((1 << len(L)) - 1) & ~L._mask(members)
    if L._up[ia] & rest != 1 << ia:
        raise AlphaNotMaximal(f"{alpha!r} is not maximal outside the building set")
    B = frozenset(L.elements[i] for i in _maxes(L, L._down[ia] & L._mask(members)))
    if len(B) < 2:
        raise VerificationFailed("max G_{<=alpha} has fewer than two elements", witness=alpha)
    new_members = members | {alpha}
    chk = is_building_set(L, new_members)
    if not chk:
        raise VerificationFailed("extended set is not a building set", chk.counterexample)
    if before is None:
        before = nested_set_complex(L, members)
    if B not in before:
        raise VerificationFailed("B is not nested", witness=sorted_labels(B))
    after = nested_set_complex(L, new_members)
    fmap = {A: (Blown(B, A - {alpha}) if alpha in A else Plain(A)) for A in after.faces}
    lhs = face_poset(after).relabel(fmap)
    rhs = combinatorial_blowup(face_poset(before), B, validate=False)
    if lhs != rhs:
        diff = set(lhs.elements) ^ set(rhs.elements)
        raise VerificationFailed(
            "face poset of N(G') differs from the blowup at B",
            witness=sorted_labels(diff)[:3] if diff else "order relation differs",
        )
    return BuildingSet(L, new_members), ExtensionReport(alpha, B, before, after)


# Δ(L̄) → Δ(Bier(L, I)‾)


@dataclass(frozen=True)
class ChainStep:
    x: object
    y: object
    length: int
    center: frozenset
    new_vertex: Interval

    def to_json(self) -> dict:
        return {
            "edge": [label_to_json(self.x), label_to_json(self.y)],
            "length": self.length,
            "new_vertex": label_to_json(self.new_vertex),
        }


@dataclass
class ChainRecord:
    lattice: Poset
    ideal: frozenset
    initial: SimplicialComplex
    steps: list[ChainStep]
    final: SimplicialComplex
    intermediates: list[SimplicialComplex] = field(default_factory=list)
    extensions: list[ExtensionReport] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "final": self.final.to_json()}


def subdivision_edges(L: Poset, ideal: Iterable) -> list[tuple]:
    """Comparable pairs x < y, x ∈ I \\ {0}, y ∈ L̄ \\ I, by increasing chain length."""
    ideal = frozenset(ideal)
    bottom, top = L.bottom(), L.top()
    pairs = [
        (x, y)
        for x in ideal
        if x != bottom
        for y in L.elements
        if y not in ideal and y != top and L.lt(x, y)
    ]
    return sorted(pairs, key=lambda p: (L.chain_length(*p), sort_key(p[0]), sort_key(p[1])))


def initial_complex(L: Poset, ideal: frozenset) -> SimplicialComplex:
    """``Δ(L̄)`` with each z renamed to its building-set element [z, 1] or [0, z]."""
    bottom, top = L.bottom(), L.top()
    if len(L) <= 2:
        return SimplicialComplex([frozenset()])
    D = order_complex(L.proper_part())
    return D.relabel({z: Interval(z, top) if z in ideal else Interval(bottom, z) for z in D.vertices})


def bier_subdivision_chain(
    L: Poset,
    ideal: Iterable,
    verify: bool = True,
    keep_intermediate: bool = False,
    edges: Sequence[tuple] | None = None,
) -> ChainRecord:
    """Subdivide ``Δ(L̄)`` along the Bier edges and land exactly on ``Δ(Bier(L, I)‾)``.

    With ``verify`` every step re-derives the nested set complex of the
    enlarged building set and checks the blowup identity against it.
    ``edges`` overrides the subdivision order (used to test tie independence).
    """
    if not L.is_lattice():
        raise NotLattice("subdivision chain needs a lattice")
    ideal = L.check_proper_ideal(ideal)
    bottom, top = L.bottom(), L.top()
    G = canonical_bier_building_set(L, ideal, validate=verify)
    host = G.host
    current = initial_complex(L, ideal)
    if verify:
        N0 = nested_set_complex(host, G.members)
        if N0 != current:
            raise StepFailed("Δ(L̄) differs from N(G)", step=0)
    if edges is None:
        edges = subdivision_edges(L, ideal)
    record = ChainRecord(L, ideal, current, [], current)
    for k, (x, y) in enumerate(edges, start=1):
        center = frozenset([Interval(x, top), Interval(bottom, y)])
        if center not in current:
            raise StepFailed(f"edge {center} is not a face at step {k}", step=k, witness=(x, y))
        new = Interval(x, y)
        current = stellar_subdivision(current, center, new)
        record.steps.append(ChainStep(x, y, L.chain_length(x, y), center, new))
        if keep_intermediate:
            record.intermediates.append(current)
        if verify:
            try:
                G, ext = extend_building_set(host, G, new, before=N0)
            except VerificationFailed as exc:
                raise StepFailed(f"step {k}: {exc}", step=k, witness=exc.witness) from exc
            except AlphaNotMaximal as exc:
                raise StepFailed(f"step {k}: {exc}", step=k, witness=new) from exc
            if ext.B != center:
                raise StepFailed(f"step {k}: B differs from the subdivided edge", step=k, witness=ext.B)
            if ext.after != current:
                raise StepFailed(f"step {k}: subdivided complex differs from N(G_{k})", step=k)
            record.extensions.append(ext)
            N0 = ext.after
    target = order_complex(host.without([host.bottom()]))
    if current != target:
        raise StepFailed("final complex differs from Δ(Bier‾)", step=len(edges))
    record.final = current
    return record
