"""Exact integral homology via Smith normal form over Python ints."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import gcd

from .errors import TooLarge

DEFAULT_MAX_FACES = 50_000


def max_faces() -> int:
    return int(os.environ.get("BIERLAB_MAX_FACES", DEFAULT_MAX_FACES))


def diagonalize(matrix: list[list[int]]) -> list[int]:
    """Nonzero diagonal entries (absolute values) of an integer diagonal form.

    Elementary row and column operations only, so the entries determine the
    cokernel up to isomorphism. The input is not modified.
    """
    A = [list(r) for r in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # smallest nonzero entry of the remaining block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        _move_to(A, t, i, j)
        while True:
            p = A[t][t]
            dirty = False
            pivot_row = A[t]
            for i in range(t + 1, m):
                v = A[i][t]
                if v:
                    q = v // p
                    row = A[i]
                    for k in range(t, n):
                        if pivot_row[k]:
                            row[k] -= q * pivot_row[k]
                    if row[t]:
                        dirty = True
            for j in range(t + 1, n):
                v = pivot_row[j]
                if v:
                    q = v // p
                    for i in range(t, m):
                        if A[i][t]:
                            A[i][j] -= q * A[i][t]
                    if pivot_row[j]:
                        dirty = True
            if not dirty:
                break
            # a smaller remainder sits in row t or column t; move it to the corner
            cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            cand += [(abs(pivot_row[j]), t, j) for j in range(t + 1, n) if pivot_row[j]]
            _, i, j = min(cand)
            _move_to(A, t, i, j)
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def _move_to(A, t, i, j):
    if i != t:
        A[t], A[i] = A[i], A[t]
    if j != t:
        for row in A:
            row[t], row[j] = row[j], row[t]


def invariant_factors(diag: list[int]) -> list[int]:
    """Turn arbitrary nonzero diagonal entries into a divisibility chain."""
    d = [x for x in diag if x]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


@dataclass(frozen=True)
class HomologyProfile:
    """Reduced integral homology. Index 0 of each list is dimension -1."""

    betti: tuple[int, ...] = ()
    torsion: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def top_dim(self) -> int:
        return len(self.betti) - 2

    def rank(self, d: int) -> int:
        k = d + 1
        return self.betti[k] if 0 <= k < len(self.betti) else 0

    def torsion_in(self, d: int) -> tuple[int, ...]:
        k = d + 1
        return self.torsion[k] if 0 <= k < len(self.torsion) else ()

    def is_trivial(self) -> bool:
        return not any(self.betti) and not any(self.torsion)

    def is_sphere(self, k: int) -> bool:
        """Reduced homology of the ``k``-sphere (``k = -1`` is the complex {∅})."""
        if any(self.torsion):
            return False
        return all(b == (1 if d == k else 0) for d, b in enumerate(self.betti, start=-1)) and self.rank(k) == 1

    def euler_characteristic(self) -> int:
        # reduced Euler characteristic plus one
        return 1 + sum((-1) ** d * b for d, b in enumerate(self.betti, start=-1))

    def to_json(self) -> dict:
        return {
            "dim": self.top_dim,
            "min_dim": -1,
            "betti": list(self.betti),
            "torsion": [list(t) for t in self.torsion],
        }


def reduced_homology(K) -> HomologyProfile:
    """Reduced homology of a :class:`~bierlab.simplicial.SimplicialComplex`."""
    total = K.num_faces()
    if total > max_faces():
        raise TooLarge(f"{total} faces exceeds the homology bound {max_faces()}")
    if total == 0:
        return HomologyProfile()
    # faces graded by size; size 0 is the empty face (dimension -1)
    graded = K.masks_by_size()
    top = len(graded) - 1
    index = [{m: i for i, m in enumerate(g)} for g in graded]
    ranks = [0] * (top + 2)
    tors: list[tuple[int, ...]] = [()] * (top + 1)
    # boundary from size s to size s-1, for s >= 1
    for s in range(1, top + 1):
        rows = []
        for m in graded[s]:
            row = [0] * len(graded[s - 1])
            sign = 1
            rest = m
            while rest:
                low = rest & -rest
                row[index[s - 1][m ^ low]] = sign
                sign = -sign
                rest ^= low
            rows.append(row)
        # rows index the s-faces; diagonal form of the transpose has the same invariants
        diag = diagonalize(rows)
        ranks[s] = len(diag)
        tors[s - 1] = tuple(f for f in invariant_factors(diag) if f > 1)
    betti = []
    for s in range(top + 1):
        betti.append(len(graded[s]) - ranks[s] - ranks[s + 1])
    return HomologyProfile(tuple(betti), tuple(tors))
