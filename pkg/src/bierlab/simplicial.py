"""Abstract simplicial complexes over labelled vertices.

Faces are stored as bitmasks over the sorted vertex table. The empty
complex (no faces at all) and the complex ``{∅}`` are different values.
"""
from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Mapping

from .errors import (
    EmptyCenter,
    EmptyComplex,
    FaceNotPresent,
    GroundTooSmall,
    NotDownwardClosed,
    NotProper,
    VertexClash,
)
from .homology import HomologyProfile, reduced_homology
from .labels import TOP, Primed, canon, sort_key, sorted_labels
from .poset import Poset, bits


def face_key(face: Iterable) -> tuple:
    return sort_key(frozenset(face))


class SimplicialComplex:
    __slots__ = ("vertices", "index", "_faces", "__dict__")

    def __init__(self, faces: Iterable[Iterable] = (), vertices: Iterable | None = None):
        faces = [frozenset(f) for f in faces]
        used = set().union(*faces) if faces else set()
        if vertices is not None:
            declared = set(vertices)
            if declared != used:
                extra = sorted_labels(declared - used)
                missing = sorted_labels(used - declared)
                raise ValueError(f"vertex table mismatch: unused {extra}, undeclared {missing}")
        self.vertices = tuple(sorted_labels(used))
        self.index = {v: i for i, v in enumerate(self.vertices)}
        masks = set()
        for f in faces:
            m = 0
            for v in f:
                m |= 1 << self.index[v]
            masks.add(m)
        for m in masks:
            rest = m
            while rest:
                low = rest & -rest
                if m ^ low not in masks:
                    sub = self._to_face(m ^ low)
                    raise NotDownwardClosed(f"face {sorted_labels(sub)} missing below {sorted_labels(self._to_face(m))}")
                rest ^= low
        self._faces = frozenset(masks)

    @classmethod
    def void(cls) -> "SimplicialComplex":
        """The empty complex: no faces, not even ∅."""
        return cls(())

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable]) -> "SimplicialComplex":
        """Downward closure of ``facets``."""
        facets = [tuple(sorted_labels(set(f))) for f in facets]
        faces = set()
        for f in facets:
            if frozenset(f) in faces:
                continue
            for k in range(len(f) + 1):
                faces.update(frozenset(c) for c in combinations(f, k))
        return cls(faces)

    @classmethod
    def _from_masks(cls, vertices: tuple, masks: Iterable[int]) -> "SimplicialComplex":
        # trusted fast path: masks over ``vertices`` that are already downward closed
        self = cls.__new__(cls)
        masks = frozenset(masks)
        used = 0
        for m in masks:
            used |= m
        keep = [i for i in range(len(vertices)) if used >> i & 1]
        if len(keep) != len(vertices):
            pos = {old: new for new, old in enumerate(keep)}
            masks = frozenset(_remap(m, pos) for m in masks)
            vertices = tuple(vertices[i] for i in keep)
        self.vertices = vertices
        self.index = {v: i for i, v in enumerate(vertices)}
        self._faces = masks
        return self

    # conversions

    def _to_face(self, mask: int) -> frozenset:
        return frozenset(self.vertices[i] for i in bits(mask))

    def _mask(self, face: Iterable) -> int | None:
        m = 0
        for v in face:
            i = self.index.get(v)
            if i is None:
                return None
            m |= 1 << i
        return m

    @property
    def faces(self) -> frozenset:
        f = self.__dict__.get("faces")
        if f is None:
            f = frozenset(self._to_face(m) for m in self._faces)
            self.__dict__["faces"] = f
        return f

    def sorted_faces(self) -> list[frozenset]:
        return sorted(self.faces, key=sort_key)

    @property
    def facets(self) -> list[frozenset]:
        """Maximal faces, sorted by label order."""
        f = self.__dict__.get("facets")
        if f is None:
            masks = self._faces
            maximal = []
            for m in masks:
                free = ~m & ((1 << len(self.vertices)) - 1)
                if not any((m | (1 << i)) in masks for i in bits(free)):
                    maximal.append(m)
            f = sorted((self._to_face(m) for m in maximal), key=sort_key)
            self.__dict__["facets"] = f
        return f

    def masks_by_size(self) -> list[list[int]]:
        top = max((bin(m).count("1") for m in self._faces), default=-1)
        graded: list[list[int]] = [[] for _ in range(top + 1)]
        for m in self._faces:
            graded[bin(m).count("1")].append(m)
        for g in graded:
            g.sort()
        return graded

    # basic queries

    def __contains__(self, face) -> bool:
        m = self._mask(face)
        return m is not None and m in self._faces

    def __len__(self) -> int:
        return len(self._faces)

    def num_faces(self) -> int:
        return len(self._faces)

    def __iter__(self):
        return iter(self.sorted_faces())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        if self.vertices != other.vertices:
            return False
        return self._faces == other._faces

    def __hash__(self) -> int:
        return hash((self.vertices, self._faces))

    def __repr__(self) -> str:
        if not self._faces:
            return "SimplicialComplex(void)"
        return f"SimplicialComplex(facets={[sorted_labels(f) for f in self.facets]})"

    def is_void(self) -> bool:
        return not self._faces

    @property
    def dim(self) -> int:
        """Dimension; -1 for {∅} and -2 for the void complex by convention."""
        if not self._faces:
            return -2
        return max(bin(m).count("1") for m in self._faces) - 1

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    def relabel(self, mapping: Mapping) -> "SimplicialComplex":
        new = [mapping[v] for v in self.vertices]
        if len(set(new)) != len(new):
            raise ValueError("relabel mapping is not injective")
        return SimplicialComplex(frozenset(mapping[v] for v in f) for f in self.faces)

    def link_free_star(self, face: Iterable) -> list[frozenset]:
        """Faces containing ``face``."""
        m = self._mask(face)
        if m is None:
            return []
        return [self._to_face(g) for g in self._faces if g & m == m]

    def to_json(self) -> dict:
        from .labels import label_to_json

        return {
            "vertices": [label_to_json(v) for v in self.vertices],
            "facets": [[label_to_json(v) for v in sorted_labels(f)] for f in self.facets],
            "void": self.is_void(),
        }

    # invariants

    def f_vector(self) -> tuple[int, ...]:
        """``(f_-1, f_0, ..., f_dim)``; empty tuple for the void complex."""
        return tuple(len(g) for g in self.masks_by_size())

    def h_vector(self) -> tuple[int, ...]:
        f = self.f_vector()
        d = len(f) - 1
        return tuple(
            sum((-1) ** (k - i) * comb(d - i, k - i) * f[i] for i in range(k + 1))
            for k in range(d + 1)
        )

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(f) - 1) for f in self.faces if f)

    def reduced_homology(self) -> HomologyProfile:
        return reduced_homology(self)


# constructors and transformations


def from_facets(facets: Iterable[Iterable]) -> SimplicialComplex:
    return SimplicialComplex.from_facets(facets)


def full_simplex(vertices: Iterable) -> SimplicialComplex:
    return SimplicialComplex.from_facets([vertices])


def simplex_boundary(vertices: Iterable) -> SimplicialComplex:
    vs = sorted_labels(set(vertices))
    return SimplicialComplex.from_facets(combinations(vs, len(vs) - 1))


def cycle(labels: Iterable) -> SimplicialComplex:
    vs = list(labels)
    return SimplicialComplex.from_facets([(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))])


def alexander_dual(K: SimplicialComplex, ground: Iterable) -> SimplicialComplex:
    """``{ground \\ σ : σ ⊆ ground, σ ∉ K}``."""
    ground = frozenset(ground)
    if not set(K.vertices) <= ground:
        raise GroundTooSmall("complex has vertices outside the ground set")
    gs = sorted_labels(ground)
    faces = []
    for k in range(len(gs) + 1):
        for c in combinations(gs, k):
            s = frozenset(c)
            if s not in K:
                faces.append(ground - s)
    return SimplicialComplex(faces)


def deleted_join_bier(K: SimplicialComplex, n: int) -> SimplicialComplex:
    """``Bier_n(K)``: faces ``σ ⊎ τ'`` with σ ∈ K, τ ∈ A(K), σ ∩ τ = ∅."""
    ground = frozenset(range(1, n + 1))
    if K.is_void():
        raise NotProper("Bier_n needs a nonempty complex")
    if not set(K.vertices) <= ground:
        raise GroundTooSmall(f"vertices must lie in 1..{n}")
    if len(K) == 2 ** n:
        raise NotProper("Bier_n needs a complex other than the full simplex")
    dual = alexander_dual(K, ground)
    faces = [
        sigma | {Primed(i) for i in tau}
        for sigma in K.faces
        for tau in dual.faces
        if not sigma & tau
    ]
    return SimplicialComplex(faces)


def default_vertex(center: Iterable) -> str:
    """Reproducible name for the apex of a stellar subdivision."""
    return "v" + canon(frozenset(center))


def stellar_subdivision(K: SimplicialComplex, center: Iterable, new_vertex=None) -> SimplicialComplex:
    """``sd_F(K)``: faces G ⊉ F, plus ``G ∪ {v}`` whenever also ``G ∪ F ∈ K``."""
    center = frozenset(center)
    if not center:
        raise EmptyCenter("stellar subdivision needs a nonempty face")
    F = K._mask(center)
    if F is None or F not in K._faces:
        raise FaceNotPresent(f"{sorted_labels(center)} is not a face")
    if new_vertex is None:
        new_vertex = default_vertex(center)
    if new_vertex in K.index:
        raise VertexClash(f"{new_vertex!r} is already a vertex")
    keep = [G for G in K._faces if G & F != F]
    cone = [G for G in keep if (G | F) in K._faces]
    # the apex takes the next free bit, then the table is re-sorted
    nv = len(K.vertices)
    vertices = K.vertices + (new_vertex,)
    masks = keep + [G | (1 << nv) for G in cone]
    order = sorted(range(len(vertices)), key=lambda i: sort_key(vertices[i]))
    pos = {old: new for new, old in enumerate(order)}
    return SimplicialComplex._from_masks(
        tuple(vertices[i] for i in order), [_remap(m, pos) for m in masks]
    )


def _remap(mask: int, pos: Mapping[int, int]) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << pos[i]
    return out


def face_poset(K: SimplicialComplex) -> Poset:
    """Faces (∅ included) ordered by inclusion."""
    if K.is_void():
        raise EmptyComplex("the void complex has no face poset")
    faces = sorted(K._faces, key=lambda m: sort_key(K._to_face(m)))
    elems = tuple(K._to_face(m) for m in faces)
    down = []
    for m in faces:
        d = 0
        for i, g in enumerate(faces):
            if g & m == g:
                d |= 1 << i
        down.append(d)
    return Poset(elems, down)


def face_lattice(K: SimplicialComplex) -> Poset:
    """Face poset with a top ``TOP`` adjoined above every face."""
    P = face_poset(K)
    n = len(P)
    elems = P.elements + (TOP,)
    down = list(P._down) + [(1 << (n + 1)) - 1]
    # TOP sorts last, so positions stay aligned
    return Poset(elems, down)


def is_pseudomanifold(K: SimplicialComplex) -> tuple[bool, str]:
    """Pure, every ridge in exactly two facets, facet-ridge graph connected.

    Returns ``(flag, reason)``; ``reason`` is ``"ok"`` on success.
    """
    if K.is_void():
        return False, "void"
    facets = [K._mask(f) for f in K.facets]
    sizes = {bin(f).count("1") for f in facets}
    if len(sizes) != 1:
        return False, "impure"
    if sizes == {0}:
        return False, "no ridges"
    ridges: dict[int, list[int]] = {}
    for idx, f in enumerate(facets):
        for i in bits(f):
            ridges.setdefault(f & ~(1 << i), []).append(idx)
    for r, owners in ridges.items():
        if len(owners) != 2:
            return False, f"ridge {sorted_labels(K._to_face(r))} lies in {len(owners)} facets"
    parent = list(range(len(facets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in ridges.values():
        parent[find(a)] = find(b)
    if len({find(i) for i in range(len(facets))}) != 1:
        return False, "disconnected"
    return True, "ok"


def f_vector(K):
    return K.f_vector()


def h_vector(K):
    return K.h_vector()


def euler_characteristic(K):
    return K.euler_characteristic()


def complex_isomorphism(K1: SimplicialComplex, K2: SimplicialComplex) -> dict | None:
    """Vertex bijection carrying faces of K1 exactly onto faces of K2, or ``None``."""
    if len(K1.vertices) != len(K2.vertices) or K1.f_vector() != K2.f_vector():
        return None
    n = len(K1.vertices)

    def profile(K):
        out = []
        for i in range(n):
            b = 1 << i
            counts = [0] * (K.dim + 2)
            for m in K._faces:
                if m & b:
                    counts[bin(m).count("1")] += 1
            facet_sizes = sorted(bin(K._mask(f)).count("1") for f in K.facets if K._mask(f) & b)
            out.append((tuple(counts), tuple(facet_sizes)))
        return out

    p1, p2 = profile(K1), profile(K2)
    if sorted(p1) != sorted(p2):
        return None
    facets1 = [K1._mask(f) for f in K1.facets]
    facets2 = set(K2._mask(f) for f in K2.facets)
    faces2 = K2._faces
    order = sorted(range(n), key=lambda i: (sum(1 for q in p1 if q == p1[i]), i))
    fmap = [-1] * n

    def partial_ok(assigned: int) -> bool:
        # every facet restricted to assigned vertices must map into a face
        for f in facets1:
            sub = f & assigned
            img = 0
            for i in bits(sub):
                img |= 1 << fmap[i]
            if img not in faces2:
                return False
        return True

    used = [False] * n

    def rec(pos: int, assigned: int) -> bool:
        if pos == n:
            img_facets = set()
            for f in facets1:
                img = 0
                for i in bits(f):
                    img |= 1 << fmap[i]
                img_facets.add(img)
            return img_facets == facets2
        i = order[pos]
        for c in range(n):
            if used[c] or p2[c] != p1[i]:
                continue
            fmap[i] = c
            used[c] = True
            if partial_ok(assigned | 1 << i) and rec(pos + 1, assigned | 1 << i):
                return True
            used[c] = False
            fmap[i] = -1
        return False

    if not rec(0, 0):
        return None
    return {K1.vertices[i]: K2.vertices[fmap[i]] for i in range(n)}
