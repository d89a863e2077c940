"""Finite posets stored as per-element bitsets of the order relation.

Element ``i`` (its position in :attr:`Poset.elements`) owns bit ``1 << i``.
``_down[i]`` is the set of elements ``<= i`` and ``_up[i]`` those ``>= i``.
"""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping

from .errors import (
    CycleDetected,
    EmptyPoset,
    NotBounded,
    NotComparable,
    NotIdeal,
    NotProperIdeal,
    SizeTooLarge,
    UnknownElement,
)
from .labels import Label, sort_key

MAX_BOOLEAN_RANK = 16
MAX_ISOMORPHISM_SIZE = 300


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Immutable finite poset.

    Build instances with :meth:`from_covers` or :meth:`from_leq`; the
    constructor itself trusts its (already closed) bitsets.
    """

    __slots__ = (
        "elements", "index", "_down", "_up", "_lower", "_upper",
        "_by_down", "_by_up", "__dict__",
    )

    def __init__(self, elements: tuple, down: list[int]):
        n = len(elements)
        self.elements = elements
        self.index = {x: i for i, x in enumerate(elements)}
        self._down = down
        up = [0] * n
        for j, d in enumerate(down):
            for i in bits(d):
                up[i] |= 1 << j
        self._up = up
        self._lower = [0] * n
        self._upper = [0] * n
        strict_down = [d & ~(1 << j) for j, d in enumerate(down)]
        for j in range(n):
            strict = strict_down[j]
            below = 0
            for i in bits(strict):
                below |= strict_down[i]
            lower = strict & ~below
            self._lower[j] = lower
            for i in bits(lower):
                self._upper[i] |= 1 << j
        self._by_down = {d: i for i, d in enumerate(down)}
        self._by_up = {u: i for i, u in enumerate(up)}

    # construction

    @classmethod
    def from_covers(cls, elements: Iterable[Label], covers: Iterable[tuple]) -> "Poset":
        """Validate a cover list. Transitively redundant pairs are dropped."""
        elems = tuple(sorted(set(elements), key=sort_key))
        index = {x: i for i, x in enumerate(elems)}
        preds: list[list[int]] = [[] for _ in elems]
        indeg = [0] * len(elems)
        succs: list[list[int]] = [[] for _ in elems]
        for lo, hi in covers:
            if lo not in index:
                raise UnknownElement(f"cover references unknown element {lo!r}")
            if hi not in index:
                raise UnknownElement(f"cover references unknown element {hi!r}")
            a, b = index[lo], index[hi]
            if a == b:
                raise CycleDetected(f"self-loop at {lo!r}")
            preds[b].append(a)
            succs[a].append(b)
            indeg[b] += 1
        # Kahn's algorithm; leftovers lie on a cycle
        ready = [i for i, d in enumerate(indeg) if d == 0]
        order = []
        while ready:
            i = ready.pop()
            order.append(i)
            for j in succs[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(order) != len(elems):
            stuck = sorted((elems[i] for i, d in enumerate(indeg) if d), key=sort_key)
            raise CycleDetected(f"cover relation has a cycle through {stuck[0]!r}")
        down = [0] * len(elems)
        for i in order:
            d = 1 << i
            for p in preds[i]:
                d |= down[p]
            down[i] = d
        return cls(elems, down)

    @classmethod
    def from_leq(cls, elements: Iterable[Label], leq: Callable[[Label, Label], bool]) -> "Poset":
        """Build from an order predicate; checks reflexivity, antisymmetry, transitivity."""
        elems = tuple(sorted(set(elements), key=sort_key))
        n = len(elems)
        down = [0] * n
        for j, y in enumerate(elems):
            d = 0
            for i, x in enumerate(elems):
                if i == j or leq(x, y):
                    d |= 1 << i
            down[j] = d
        _check_partial_order(elems, down)
        return cls(elems, down)

    @classmethod
    def _from_masks(cls, elements: tuple, down: list[int]) -> "Poset":
        _check_partial_order(elements, down)
        return cls(elements, down)

    # basic queries

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self.covers)} covers)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self.covers == other.covers

    def __hash__(self) -> int:
        return hash((self.elements, self.covers))

    def _idx(self, x) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownElement(f"{x!r} is not an element") from None

    def _labels(self, mask: int) -> list:
        return [self.elements[i] for i in bits(mask)]

    @property
    def covers(self) -> frozenset:
        c = self.__dict__.get("covers")
        if c is None:
            c = frozenset(
                (self.elements[i], self.elements[j])
                for j in range(len(self))
                for i in bits(self._lower[j])
            )
            self.__dict__["covers"] = c
        return c

    def leq(self, x, y) -> bool:
        return bool(self._down[self._idx(y)] >> self._idx(x) & 1)

    def lt(self, x, y) -> bool:
        return x != y and self.leq(x, y)

    def comparable(self, x, y) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def is_cover(self, x, y) -> bool:
        return bool(self._lower[self._idx(y)] >> self._idx(x) & 1)

    def lower_covers(self, x) -> list:
        return self._labels(self._lower[self._idx(x)])

    def upper_covers(self, x) -> list:
        return self._labels(self._upper[self._idx(x)])

    def down_set(self, x) -> list:
        return self._labels(self._down[self._idx(x)])

    def up_set(self, x) -> list:
        return self._labels(self._up[self._idx(x)])

    def minimal(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self._lower[i]]

    def maximal(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self._upper[i]]

    def linear_extension(self) -> list:
        """Elements sorted by (length of longest chain below, label)."""
        h = self._heights_below()
        return sorted(self.elements, key=lambda x: (h[self.index[x]], sort_key(x)))

    def _heights_below(self) -> list[int]:
        h = self.__dict__.get("_hb")
        if h is None:
            n = len(self)
            h = [-1] * n
            # element positions are not topologically sorted; use popcount order
            for j in sorted(range(n), key=lambda j: bin(self._down[j]).count("1")):
                h[j] = max((h[i] + 1 for i in bits(self._lower[j])), default=0)
            self.__dict__["_hb"] = h
        return h

    def _heights_above(self) -> list[int]:
        h = self.__dict__.get("_ha")
        if h is None:
            n = len(self)
            h = [-1] * n
            for j in sorted(range(n), key=lambda j: bin(self._up[j]).count("1")):
                h[j] = max((h[i] + 1 for i in bits(self._upper[j])), default=0)
            self.__dict__["_ha"] = h
        return h

    # bounds, meets, joins

    def bounds(self):
        """``(bottom, top)`` if the poset is bounded, else ``None``."""
        if not self.elements:
            raise EmptyPoset("empty poset has no bounds")
        lo, hi = self.minimal(), self.maximal()
        if len(lo) == 1 and len(hi) == 1:
            return lo[0], hi[0]
        return None

    def bottom(self):
        lo = self.minimal()
        if len(lo) != 1:
            raise NotBounded("no unique minimum")
        return lo[0]

    def top(self):
        hi = self.maximal()
        if len(hi) != 1:
            raise NotBounded("no unique maximum")
        return hi[0]

    def meet(self, x, y):
        common = self._down[self._idx(x)] & self._down[self._idx(y)]
        i = self._by_down.get(common)
        return None if i is None else self.elements[i]

    def join(self, x, y):
        common = self._up[self._idx(x)] & self._up[self._idx(y)]
        i = self._by_up.get(common)
        return None if i is None else self.elements[i]

    def join_all(self, xs: Iterable):
        """Join of a nonempty family, or ``None`` when it does not exist."""
        mask = -1
        for x in xs:
            mask &= self._up[self._idx(x)]
        if mask == -1:
            raise ValueError("join_all of an empty family")
        i = self._by_up.get(mask)
        return None if i is None else self.elements[i]

    def is_meet_semilattice(self) -> bool:
        if not self.elements:
            raise EmptyPoset("empty poset")
        downs = self._down
        table = self._by_down
        n = len(downs)
        for i in range(n):
            di = downs[i]
            for j in range(i + 1, n):
                if di & downs[j] not in table:
                    return False
        return True

    def is_join_semilattice(self) -> bool:
        if not self.elements:
            raise EmptyPoset("empty poset")
        ups = self._up
        table = self._by_up
        n = len(ups)
        for i in range(n):
            ui = ups[i]
            for j in range(i + 1, n):
                if ui & ups[j] not in table:
                    return False
        return True

    def is_lattice(self) -> bool:
        return self.is_meet_semilattice() and self.is_join_semilattice()

    # derived posets

    def subposet(self, xs: Iterable) -> "Poset":
        """Induced subposet."""
        keep = sorted({self._idx(x) for x in xs}, key=lambda i: sort_key(self.elements[i]))
        pos = {old: new for new, old in enumerate(keep)}
        mask = 0
        for i in keep:
            mask |= 1 << i
        down = []
        for j in keep:
            d = 0
            for i in bits(self._down[j] & mask):
                d |= 1 << pos[i]
            down.append(d)
        return Poset(tuple(self.elements[i] for i in keep), down)

    def interval(self, x, y) -> "Poset":
        i, j = self._idx(x), self._idx(y)
        if not self._down[j] >> i & 1:
            raise NotComparable(f"{x!r} is not below {y!r}")
        return self.subposet(self._labels(self._up[i] & self._down[j]))

    def proper_part(self) -> "Poset":
        b = self.bounds()
        if b is None:
            raise NotBounded("proper part needs a bounded poset")
        if len(self) < 2:
            raise NotBounded("proper part needs at least two elements")
        lo, hi = b
        return self.subposet(x for x in self.elements if x != lo and x != hi)

    def without(self, xs: Iterable) -> "Poset":
        drop = set(xs)
        return self.subposet(x for x in self.elements if x not in drop)

    def relabel(self, mapping: Mapping) -> "Poset":
        """Rename elements through an injective ``mapping``."""
        new = [mapping[x] for x in self.elements]
        if len(set(new)) != len(new):
            raise ValueError("relabel mapping is not injective")
        order = sorted(range(len(new)), key=lambda i: sort_key(new[i]))
        pos = [0] * len(new)
        for k, i in enumerate(order):
            pos[i] = k
        down = []
        for i in order:
            d = 0
            for t in bits(self._down[i]):
                d |= 1 << pos[t]
            down.append(d)
        return Poset(tuple(new[i] for i in order), down)

    def chain_length(self, x, y) -> int:
        """Number of covers in a longest chain from ``x`` up to ``y``."""
        i, j = self._idx(x), self._idx(y)
        if not self._down[j] >> i & 1:
            raise NotComparable(f"{x!r} is not below {y!r}")
        span = self._up[i] & self._down[j]
        best = {i: 0}
        for k in sorted(bits(span), key=lambda k: bin(self._down[k]).count("1")):
            if k == i:
                continue
            best[k] = max(best[p] + 1 for p in bits(self._lower[k] & span))
        return best[j]

    # ideals

    def is_ideal(self, members: Iterable) -> bool:
        mask = self._mask(members)
        return all(self._down[i] & ~mask == 0 for i in bits(mask))

    def _mask(self, xs: Iterable) -> int:
        m = 0
        for x in xs:
            m |= 1 << self._idx(x)
        return m

    def check_proper_ideal(self, members: Iterable) -> frozenset:
        members = frozenset(members)
        if not self.is_ideal(members):
            raise NotIdeal("set is not downward closed")
        if not members or len(members) == len(self):
            raise NotProperIdeal("ideal must be nonempty and not the whole poset")
        return members

    def ideal_generated_by(self, xs: Iterable) -> frozenset:
        mask = 0
        for x in xs:
            mask |= self._down[self._idx(x)]
        return frozenset(self._labels(mask))


def _check_partial_order(elems: tuple, down: list[int]) -> None:
    for j, d in enumerate(down):
        if not d >> j & 1:
            raise ValueError(f"relation is not reflexive at {elems[j]!r}")
        for i in bits(d & ~(1 << j)):
            if down[i] >> j & 1:
                raise CycleDetected(f"{elems[i]!r} and {elems[j]!r} are mutually below each other")
            if down[i] & ~d:
                raise ValueError(f"relation is not transitive at {elems[j]!r}")


# module-level operations


def from_covers(elements, covers) -> Poset:
    return Poset.from_covers(elements, covers)


def boolean_lattice(n: int) -> Poset:
    """All subsets of ``{1..n}`` (as frozensets) ordered by inclusion."""
    if n < 0 or n > MAX_BOOLEAN_RANK:
        raise SizeTooLarge(f"boolean lattice rank must be in [0, {MAX_BOOLEAN_RANK}]")
    ground = range(1, n + 1)
    elems = [frozenset(c) for k in range(n + 1) for c in combinations(ground, k)]
    covers = [(s, s | {i}) for s in elems for i in ground if i not in s]
    return Poset.from_covers(elems, covers)


def chain(k: int) -> Poset:
    """Chain ``0 < 1 < ... < k-1``."""
    return Poset.from_covers(range(k), [(i, i + 1) for i in range(k - 1)])


def antichain(labels: Iterable) -> Poset:
    return Poset.from_covers(labels, [])


def is_bounded(P: Poset) -> bool:
    return P.bounds() is not None


def meet(P: Poset, x, y):
    return P.meet(x, y)


def join(P: Poset, x, y):
    return P.join(x, y)


def is_lattice(P: Poset) -> bool:
    return P.is_lattice()


def is_meet_semilattice(P: Poset) -> bool:
    return P.is_meet_semilattice()


def interval(P: Poset, x, y) -> Poset:
    return P.interval(x, y)


def proper_part(P: Poset) -> Poset:
    return P.proper_part()


def chain_length(P: Poset, x, y) -> int:
    return P.chain_length(x, y)


def enumerate_ideals(P: Poset) -> Iterator[frozenset]:
    """Every downward-closed subset (including empty and full), deterministically."""
    order = [P.index[x] for x in P.linear_extension()]
    lower = P._lower
    n = len(order)
    chosen = 0

    def rec(pos: int):
        nonlocal chosen
        if pos == n:
            yield frozenset(P._labels(chosen))
            return
        i = order[pos]
        yield from rec(pos + 1)
        if lower[i] & ~chosen == 0:
            chosen |= 1 << i
            yield from rec(pos + 1)
            chosen &= ~(1 << i)

    yield from rec(0)


def enumerate_proper_ideals(P: Poset) -> Iterator[frozenset]:
    """Every nonempty, downward-closed, proper subset exactly once."""
    if P.bounds() is None:
        raise NotBounded("proper ideals are enumerated on bounded posets")
    for ideal in enumerate_ideals(P):
        if ideal and len(ideal) < len(P):
            yield ideal


def order_complex(P: Poset):
    """Simplicial complex of all chains of ``P``."""
    from .simplicial import SimplicialComplex

    n = len(P)
    ext = [P.index[x] for x in P.linear_extension()]
    rank = {i: r for r, i in enumerate(ext)}
    strict_up = [P._up[i] & ~(1 << i) for i in range(n)]
    faces = [frozenset()]

    def grow(chain: list[int], last: int):
        for j in sorted(bits(strict_up[last]), key=rank.__getitem__):
            chain.append(j)
            faces.append(frozenset(P.elements[k] for k in chain))
            grow(chain, j)
            chain.pop()

    for i in ext:
        faces.append(frozenset([P.elements[i]]))
        grow([i], i)
    return SimplicialComplex(faces)


def is_isomorphism(P: Poset, Q: Poset, f: Mapping) -> bool:
    """True iff ``f`` is a bijection carrying covers of P exactly onto covers of Q."""
    if len(P) != len(Q) or set(f) != set(P.elements):
        return False
    if set(f.values()) != set(Q.elements):
        return False
    return {(f[a], f[b]) for a, b in P.covers} == Q.covers


def _fingerprints(P: Poset) -> list[tuple]:
    hb, ha = P._heights_below(), P._heights_above()
    pc = lambda m: bin(m).count("1")
    return [
        (hb[i], ha[i], pc(P._lower[i]), pc(P._upper[i]), pc(P._down[i]), pc(P._up[i]))
        for i in range(len(P))
    ]


def poset_isomorphism(P: Poset, Q: Poset) -> dict | None:
    """An order isomorphism ``P -> Q`` as a dict, or ``None``.

    Backtracking over fingerprint classes (heights, cover degrees, sizes of
    principal ideals/filters), extending along cover edges so each new
    assignment is constrained by an already-mapped neighbour.
    """
    n = len(P)
    if n != len(Q) or len(P.covers) != len(Q.covers):
        return None
    if n > MAX_ISOMORPHISM_SIZE:
        raise SizeTooLarge(f"isomorphism search is limited to {MAX_ISOMORPHISM_SIZE} elements")
    if n == 0:
        return {}
    fp, fq = _fingerprints(P), _fingerprints(Q)
    if sorted(fp) != sorted(fq):
        return None
    by_fp: dict[tuple, list[int]] = {}
    for j in sorted(range(n), key=lambda j: sort_key(Q.elements[j])):
        by_fp.setdefault(fq[j], []).append(j)

    # visit order: BFS over the cover graph, rarest fingerprint first
    rarity = {k: len(v) for k, v in by_fp.items()}
    adj = [P._lower[i] | P._upper[i] for i in range(n)]
    seen = 0
    order: list[int] = []
    remaining = sorted(range(n), key=lambda i: (rarity[fp[i]], sort_key(P.elements[i])))
    for start in remaining:
        if seen >> start & 1:
            continue
        seen |= 1 << start
        queue = [start]
        while queue:
            i = queue.pop(0)
            order.append(i)
            for j in sorted(bits(adj[i] & ~seen), key=lambda j: (rarity[fp[j]], sort_key(P.elements[j]))):
                seen |= 1 << j
                queue.append(j)

    fmap = [-1] * n
    used = 0
    assigned_p = 0
    pl, pu, ql, qu = P._lower, P._upper, Q._lower, Q._upper

    def consistent(i: int, c: int) -> bool:
        for mp, mq in ((pl[i], ql[c]), (pu[i], qu[c])):
            a = mp & assigned_p
            cnt = 0
            for k in bits(a):
                if not mq >> fmap[k] & 1:
                    return False
                cnt += 1
            if bin(mq & used).count("1") != cnt:
                return False
        return True

    def rec(pos: int) -> bool:
        nonlocal used, assigned_p
        if pos == n:
            return True
        i = order[pos]
        cands = by_fp[fp[i]]
        anchor = adj[i] & assigned_p
        if anchor:
            k = next(bits(anchor))
            nb = ql[fmap[k]] | qu[fmap[k]]
            cands = [c for c in cands if nb >> c & 1]
        for c in cands:
            if used >> c & 1 or not consistent(i, c):
                continue
            fmap[i] = c
            used |= 1 << c
            assigned_p |= 1 << i
            if rec(pos + 1):
                return True
            used &= ~(1 << c)
            assigned_p &= ~(1 << i)
            fmap[i] = -1
        return False

    import sys

    limit = sys.getrecursionlimit()
    if limit < n + 100:
        sys.setrecursionlimit(n + 100)
    if not rec(0):
        return None
    return {P.elements[i]: Q.elements[fmap[i]] for i in range(n)}
