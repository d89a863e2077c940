"""Shellings: condition (T) and (S) checks, recursive coatom orderings,
shelling search, and transport of a shelling through a stellar subdivision.

Positions in violations and in transport certificates count from 1, the way
facet orderings ``F_1, ..., F_n`` are usually written.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

from .errors import (
    CenterNotFace,
    EmptyComplex,
    InputNotCertified,
    NotBounded,
    NotCoatoms,
    NotLattice,
    PartialOrderViolated,
    StepFailed,
    Timeout,
    VerificationFailed,
)
from .labels import canon, label_to_json, sort_key, sorted_labels
from .nested import Check, bier_subdivision_chain
from .poset import Poset, bits
from .simplicial import SimplicialComplex, default_vertex, stellar_subdivision

DEFAULT_TIMEOUT = 120.0


@dataclass
class FacetOrdering:
    facets: list[frozenset]
    certificate: dict | None = None  # blown facet -> {"mf": s, "A": l}

    def __len__(self):
        return len(self.facets)

    def __iter__(self):
        return iter(self.facets)

    def to_json(self) -> dict:
        out = {"order": [[label_to_json(v) for v in sorted_labels(f)] for f in self.facets]}
        if self.certificate is not None:
            out["certificate"] = {
                "mf": {canon(f): c["mf"] for f, c in self.certificate.items()},
                "A": {canon(f): c["A"] for f, c in self.certificate.items()},
            }
        return out


@dataclass
class ShellingReport:
    ordering: FacetOrdering
    criterion: str = "T"
    witnesses: list = field(default_factory=list)  # per position: {i: k}

    def replay(self) -> bool:
        """Re-validate every stored (T) witness."""
        masks = self.ordering.facets
        for j, wit in enumerate(self.witnesses):
            Fj = masks[j]
            if set(wit) != set(range(j)):
                return False
            for i, k in wit.items():
                if not k < j:
                    return False
                ridge = masks[k] & Fj
                if len(ridge) != len(Fj) - 1 or not (masks[i] & Fj) <= ridge:
                    return False
        return True

    def to_json(self) -> dict:
        out = {"criterion": self.criterion}
        out.update(self.ordering.to_json())
        return out


class _Deadline:
    def __init__(self, timeout: float | None):
        self.stop = None if timeout is None else time.monotonic() + timeout

    def check(self):
        if self.stop is not None and time.monotonic() > self.stop:
            raise Timeout("shelling search exceeded its time budget")


# condition checks on lattices


def _coatom_indices(P: Poset, order: Sequence) -> tuple[int, list[int]]:
    b = P.bounds()
    if b is None:
        raise NotBounded("coatom orderings need a bounded poset")
    top = P.index[b[1]]
    idx = [P._idx(c) for c in order]
    if len(set(idx)) != len(idx) or sum(1 << i for i in idx) != P._lower[top]:
        raise NotCoatoms("ordering must list every coatom exactly once")
    return top, idx


def check_condition_T(Lhat: Poset, order: Sequence) -> Check:
    """For i < j some k < j has ``c_i ∧ c_j ≤ c_k ∧ c_j ⋖ c_j``; reports the first failing (i, j)."""
    if not Lhat.is_lattice():
        raise NotLattice("condition (T) is stated for lattices")
    _, idx = _coatom_indices(Lhat, order)
    down, lower, by_down = Lhat._down, Lhat._lower, Lhat._by_down
    for j in range(len(idx)):
        cj = idx[j]
        meets = [by_down[down[idx[k]] & down[cj]] for k in range(j)]
        good = [m for m in meets if lower[cj] >> m & 1]
        for i in range(j):
            mij = meets[i]
            if not any(down[g] >> mij & 1 for g in good):
                return Check(False, (i + 1, j + 1))
    return Check(True)


def check_condition_S(P: Poset, order: Sequence) -> Check:
    """Every x below c_i and c_k (i < k) lies under a coatom of [0, c_k] that is below some earlier c_j."""
    _, idx = _coatom_indices(P, order)
    return _condition_S(P, idx)


def _condition_S(P: Poset, idx: list[int]) -> Check:
    down, lower = P._down, P._lower
    for k in range(1, len(idx)):
        ck = idx[k]
        reach = 0
        for w in bits(lower[ck]):
            if any(down[idx[j]] >> w & 1 for j in range(k)):
                reach |= down[w]
        for i in range(k):
            common = down[idx[i]] & down[ck]
            if common & ~reach:
                return Check(False, (i + 1, k + 1))
    return Check(True)


def check_recursive_coatom_ordering(P: Poset, order: Sequence, timeout: float | None = DEFAULT_TIMEOUT) -> Check:
    """(S) for ``order`` plus (R): each lower interval admits a recursive coatom
    ordering listing the coatoms shared with earlier intervals first."""
    if len(P) == 2 and P.bounds() is not None:
        return Check(True)
    _, idx = _coatom_indices(P, order)
    s = _condition_S(P, idx)
    if not s:
        return s
    memo: dict = {}
    deadline = _Deadline(timeout)
    for j, cj in enumerate(idx):
        first = 0
        for w in bits(P._lower[cj]):
            if any(P._down[idx[i]] >> w & 1 for i in range(j)):
                first |= 1 << w
        if _rco_exists(P, cj, first, memo, deadline) is None:
            return Check(False, ("R", j + 1))
    return Check(True)


def find_recursive_coatom_ordering(P: Poset, timeout: float | None = DEFAULT_TIMEOUT) -> list | None:
    """Some recursive coatom ordering of ``P`` (as labels), or ``None``."""
    b = P.bounds()
    if b is None:
        raise NotBounded("recursive coatom orderings need a bounded poset")
    top = P.index[b[1]]
    found = _rco_exists(P, top, 0, {}, _Deadline(timeout))
    return None if found is None else [P.elements[i] for i in found]


def _rco_exists(P: Poset, top: int, first: int, memo: dict, deadline: _Deadline):
    """A recursive coatom ordering of [0, top] with ``first`` coatoms leading, or None."""
    key = (top, first)
    if key in memo:
        return memo[key]
    coatoms = sorted(bits(P._lower[top]))
    if bin(P._down[top]).count("1") <= 2:
        memo[key] = coatoms
        return coatoms
    lead = [c for c in coatoms if first >> c & 1]
    rest = [c for c in coatoms if not first >> c & 1]
    result = None
    for p in permutations(lead):
        for q in permutations(rest):
            deadline.check()
            idx = list(p) + list(q)
            if not _condition_S(P, idx):
                continue
            ok = True
            for j, cj in enumerate(idx):
                sub_first = 0
                for w in bits(P._lower[cj]):
                    if any(P._down[idx[i]] >> w & 1 for i in range(j)):
                        sub_first |= 1 << w
                if _rco_exists(P, cj, sub_first, memo, deadline) is None:
                    ok = False
                    break
            if ok:
                result = idx
                break
        if result is not None:
            break
    memo[key] = result
    return result


# condition (T) on facet lists


def _t_witness(masks: Sequence[frozenset], placed: Sequence[int], j: int) -> dict | None:
    Fj = masks[j]
    want = len(Fj) - 1
    ridges = []
    for k in placed:
        r = masks[k] & Fj
        if len(r) == want:
            ridges.append((k, r))
    wit = {}
    for i in placed:
        inter = masks[i] & Fj
        for k, r in ridges:
            if inter <= r:
                wit[i] = k
                break
        else:
            return None
    return wit


def check_shelling_order(facets: Sequence[Iterable]) -> Check:
    """(T) read on faces: F_i ∩ F_j lies in some F_k ∩ F_j of codimension one in F_j, k < j."""
    fs = [frozenset(f) for f in facets]
    for j in range(len(fs)):
        Fj = fs[j]
        ridges = [fs[k] & Fj for k in range(j) if len(fs[k] & Fj) == len(Fj) - 1]
        for i in range(j):
            inter = fs[i] & Fj
            if not any(inter <= r for r in ridges):
                return Check(False, (i + 1, j + 1))
    return Check(True)


def find_shelling(K: SimplicialComplex, timeout: float | None = DEFAULT_TIMEOUT) -> ShellingReport | None:
    """Lexicographically first (T)-certified facet ordering, or ``None`` after exhaustive search.

    Whether a facet may come next depends only on the set already placed,
    so failing sets are memoised.
    """
    if K.is_void():
        raise EmptyComplex("the void complex has no facets")
    facets = K.facets
    m = len(facets)
    deadline = _Deadline(timeout)
    dead: set[int] = set()
    order: list[int] = []
    witnesses: list[dict] = []

    def rec(used: int) -> bool:
        if len(order) == m:
            return True
        if used in dead:
            return False
        deadline.check()
        for j in range(m):
            if used >> j & 1:
                continue
            wit = _t_witness(facets, order, j)
            if wit is None:
                continue
            order.append(j)
            witnesses.append({order.index(i): order.index(k) for i, k in wit.items()})
            if rec(used | 1 << j):
                return True
            order.pop()
            witnesses.pop()
        dead.add(used)
        return False

    if not rec(0):
        return None
    return ShellingReport(FacetOrdering([facets[j] for j in order]), "T", witnesses)


def is_shelling_bruteforce(facets: Sequence[frozenset]) -> bool:
    """Textbook test: each F_j meets the earlier facets in a pure (dim F_j - 1) subcomplex."""
    fs = [frozenset(f) for f in facets]
    for j in range(1, len(fs)):
        inters = {fs[i] & fs[j] for i in range(j)}
        maximal = [a for a in inters if not any(a < b for b in inters)]
        if any(len(a) != len(fs[j]) - 1 for a in maximal):
            return False
    return True


def is_shellable_bruteforce(K: SimplicialComplex) -> bool:
    """Oracle over all facet permutations; tiny complexes only."""
    return any(is_shelling_bruteforce(p) for p in permutations(K.facets))


# transport through a stellar subdivision


@dataclass
class TransportData:
    """Intermediate sets of the transport, kept for inspection and replay."""

    I: list[int]
    C: list[frozenset]
    mf: dict
    A: dict


def transport_data(facets: Sequence[frozenset], alpha: frozenset) -> TransportData:
    I = [i for i, F in enumerate(facets) if alpha <= F]
    C = sorted({facets[i] - {w} for i in I for w in alpha}, key=sort_key)
    mf = {G: min(s for s in I if G < facets[s] and len(facets[s]) == len(G) + 1) for G in C}
    A = {G: min(l for l, F in enumerate(facets) if G <= F) for G in C}
    return TransportData(I, C, mf, A)


def transport_ordering(
    K: SimplicialComplex,
    order: FacetOrdering | Sequence[Iterable],
    alpha: Iterable,
    new_vertex=None,
) -> FacetOrdering:
    """Carry a certified facet ordering of ``K`` to one of ``sd_alpha(K)``.

    Kept facets ``F_i`` (those not containing alpha) keep their relative
    order. Each ``G ∈ C`` (a ridge of a facet through alpha that misses a
    vertex of alpha) becomes the facet ``G ∪ {v}`` and is keyed by
    ``(mf(G), A(G))``: ``mf`` the first facet through alpha having ``G`` as
    a ridge and ``A`` the first facet containing ``G`` at all. A kept facet
    precedes ``G ∪ {v}`` exactly when its position is below ``mf(G)``.
    """
    facets = [frozenset(f) for f in (order.facets if isinstance(order, FacetOrdering) else order)]
    alpha = frozenset(alpha)
    if sorted(facets, key=sort_key) != K.facets or len(facets) != len(K.facets):
        raise InputNotCertified("ordering does not list the facets of K exactly once")
    if not check_shelling_order(facets):
        raise InputNotCertified("input ordering fails condition (T)")
    if not alpha or alpha not in K:
        raise CenterNotFace(f"{sorted_labels(alpha)} is not a nonempty face")
    if new_vertex is None:
        new_vertex = default_vertex(alpha)
    data = transport_data(facets, alpha)
    for G in data.C:
        if data.A[G] > data.mf[G]:
            raise PartialOrderViolated("A(G) exceeds mf(G)", witness=sorted_labels(G))
    I = set(data.I)
    nodes: list[tuple] = [("F", i) for i in range(len(facets)) if i not in I] + [("B", G) for G in data.C]
    face_of = {
        node: (facets[node[1]] if node[0] == "F" else node[1] | {new_vertex}) for node in nodes
    }

    def precedes(a, b) -> bool:
        if a[0] == "F" and b[0] == "F":
            return a[1] < b[1]
        if a[0] == "F":
            return a[1] < data.mf[b[1]]
        if b[0] == "F":
            return data.mf[a[1]] < b[1]
        ka = (data.mf[a[1]], data.A[a[1]])
        kb = (data.mf[b[1]], data.A[b[1]])
        return ka < kb

    n = len(nodes)
    rel = [[precedes(nodes[a], nodes[b]) for b in range(n)] for a in range(n)]
    for a in range(n):
        if rel[a][a]:
            raise PartialOrderViolated("relation is not irreflexive", witness=nodes[a])
        for b in range(n):
            if rel[a][b] and rel[b][a]:
                raise PartialOrderViolated("relation is not antisymmetric", witness=(nodes[a], nodes[b]))
            if rel[a][b]:
                for c in range(n):
                    if rel[b][c] and not rel[a][c]:
                        raise PartialOrderViolated("relation is not transitive", witness=(nodes[a], nodes[c]))
    # Kahn's algorithm, smallest facet label first among the available ones
    indeg = [sum(rel[a][b] for a in range(n)) for b in range(n)]
    heap = [(sort_key(face_of[nodes[b]]), b) for b in range(n) if indeg[b] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, a = heapq.heappop(heap)
        out.append(a)
        for b in range(n):
            if rel[a][b]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    heapq.heappush(heap, (sort_key(face_of[nodes[b]]), b))
    if len(out) != n:
        raise PartialOrderViolated("relation has a cycle")
    result = [face_of[nodes[a]] for a in out]
    cert = {
        face_of[node]: {"mf": data.mf[node[1]] + 1, "A": data.A[node[1]] + 1}
        for node in nodes
        if node[0] == "B"
    }
    sd = stellar_subdivision(K, alpha, new_vertex)
    if sorted(result, key=sort_key) != sd.facets:
        raise VerificationFailed("transported ordering does not list the facets of sd(K)")
    chk = check_shelling_order(result)
    if not chk:
        raise VerificationFailed("transported ordering fails condition (T)", witness=chk.counterexample)
    return FacetOrdering(result, cert)


def replay_certificate(K: SimplicialComplex, order: FacetOrdering, alpha, new_vertex, result: FacetOrdering) -> bool:
    """Recompute (mf, A) for every blown facet and compare with the stored values."""
    data = transport_data([frozenset(f) for f in order.facets], frozenset(alpha))
    recomputed = {
        G | {new_vertex}: {"mf": data.mf[G] + 1, "A": data.A[G] + 1} for G in data.C
    }
    return recomputed == result.certificate


# the full Bier pipeline


@dataclass
class PipelineStep:
    alpha: frozenset
    new_vertex: object
    ordering: FacetOrdering

    def to_json(self) -> dict:
        out = {
            "alpha": [label_to_json(v) for v in sorted_labels(self.alpha)],
            "new_vertex": label_to_json(self.new_vertex),
        }
        out.update(self.ordering.to_json())
        return out


@dataclass
class PipelineReport:
    base: ShellingReport
    steps: list[PipelineStep]
    complex: SimplicialComplex
    ordering: FacetOrdering
    criterion: str = "T"

    def replay(self) -> bool:
        if not self.base.replay():
            return False
        K, O = _start_complex(self.base), self.base.ordering
        for st in self.steps:
            if not replay_certificate(K, O, st.alpha, st.new_vertex, st.ordering):
                return False
            K = stellar_subdivision(K, st.alpha, st.new_vertex)
            O = st.ordering
        return K == self.complex and bool(check_shelling_order(O.facets))

    def to_json(self) -> dict:
        out = {"criterion": self.criterion}
        out.update(self.ordering.to_json())
        out["certificate"] = {
            "base": self.base.to_json()["order"],
            "steps": [s.to_json() for s in self.steps],
        }
        return out


def _start_complex(base: ShellingReport) -> SimplicialComplex:
    return SimplicialComplex.from_facets(base.ordering.facets)


def bier_shelling_pipeline(
    L: Poset, ideal: Iterable, timeout: float | None = DEFAULT_TIMEOUT, verify_chain: bool = True
) -> PipelineReport:
    """Shell ``Δ(L̄)``, then transport the shelling along every Bier subdivision."""
    record = bier_subdivision_chain(L, ideal, verify=verify_chain)
    K = record.initial
    base = find_shelling(K, timeout=timeout)
    if base is None:
        raise StepFailed("Δ(L̄) is not shellable", step=0)
    O = base.ordering
    steps = []
    for k, st in enumerate(record.steps, start=1):
        try:
            O = transport_ordering(K, O, st.center, st.new_vertex)
        except VerificationFailed as exc:
            raise StepFailed(f"transport failed at step {k}: {exc}", step=k, witness=exc.witness) from exc
        K = stellar_subdivision(K, st.center, st.new_vertex)
        steps.append(PipelineStep(st.center, st.new_vertex, O))
    if K != record.final:
        raise StepFailed("pipeline complex differs from Δ(Bier‾)", step=len(steps))
    if not check_shelling_order(O.facets):
        raise StepFailed("final ordering fails condition (T)", step=len(steps))
    return PipelineReport(base, steps, K, O)
