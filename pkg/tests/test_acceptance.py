"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the per-criterion lines
are repeated in the terminal summary.
"""
import json
import random
import time
from itertools import permutations

from bierlab.bier import bier_poset, canonical_boolean_map, verify_boolean_bier
from bierlab.cli import main
from bierlab.io import complex_from_json, write_json
from bierlab.labels import Blown, Plain
from bierlab.nested import bier_host, bier_subdivision_chain, combinatorial_blowup, chain_nested_isomorphism
from bierlab.poset import boolean_lattice, enumerate_proper_ideals, is_isomorphism, order_complex
from bierlab.shelling import (
    check_condition_S,
    check_condition_T,
    check_shelling_order,
    find_recursive_coatom_ordering,
    find_shelling,
    is_shelling_bruteforce,
    transport_ordering,
)
from bierlab.simplicial import (
    SimplicialComplex,
    deleted_join_bier,
    face_lattice,
    face_poset,
    is_pseudomanifold,
    simplex_boundary,
    stellar_subdivision,
)

from families import all_complexes, complex_iso_classes, face_lattices_small, random_complex

# Dedekind numbers M(n) count all ideals of B_n, empty and full included
DEDEKIND = {1: 3, 2: 6, 3: 20, 4: 168}
PROPER_IDEALS = {2: 4, 3: 18, 4: 166}


def subset_filter_count(n: int) -> int:
    """Proper ideals of B_n by filtering all 2^(2^n) subsets of its elements."""
    size = 1 << n
    # element m (a bitmask over [n]) is below e iff m & e == m
    below = [sum(1 << m for m in range(size) if m & e == m) for e in range(size)]
    full = (1 << size) - 1
    count = 0
    for s in range(1, full):
        t = s
        ok = True
        while t:
            low = t & -t
            if below[low.bit_length() - 1] & ~s:
                ok = False
                break
            t ^= low
        count += ok
    return count


def bier_family():
    return [boolean_lattice(2), boolean_lattice(3), boolean_lattice(4)] + face_lattices_small(3)


def test_criterion_1_bier_spheres(criterion):
    start = time.monotonic()
    failures = []
    checked = 0
    for n in (2, 3, 4):
        Bn = boolean_lattice(n)
        ideals = list(enumerate_proper_ideals(Bn))
        brute = subset_filter_count(n)
        if not (len(ideals) == brute == PROPER_IDEALS[n] == DEDEKIND[n] - 2):
            failures.append(("count", n, len(ideals), brute))
        for ideal in ideals:
            checked += 1
            B = bier_poset(Bn, ideal)
            sphere_vertices = len(B.upper_covers(B.bottom()))
            joined = deleted_join_bier(SimplicialComplex(ideal), n)
            D = order_complex(B.proper_part())
            ok_pm, _ = is_pseudomanifold(D)
            H = D.reduced_homology()
            if sphere_vertices > 2 * n or len(joined.vertices) > 2 * n:
                failures.append(("vertices", n, sorted(map(sorted, ideal))))
            if not ok_pm:
                failures.append(("pseudomanifold", n, sorted(map(sorted, ideal))))
            if not H.is_sphere(n - 2) or not joined.reduced_homology().is_sphere(n - 2):
                failures.append(("homology", n, sorted(map(sorted, ideal))))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 300
    assert criterion(1, "Bier spheres for n=2,3,4", ok, f"{checked} ideals, {elapsed:.1f}s"), failures[:5]


def test_criterion_2_boolean_identification(criterion):
    failures = []
    checked = 0
    for n in (1, 2, 3, 4):
        for K in all_complexes(n):
            if len(K.faces) == 2 ** n:
                continue
            checked += 1
            rep = verify_boolean_bier(K, n)
            lhs = face_lattice(deleted_join_bier(K, n))
            rhs = bier_poset(boolean_lattice(n), K.faces)
            if not is_isomorphism(lhs, rhs, rep.witness):
                failures.append((n, K))
            if rep.witness != canonical_boolean_map(n, K):
                failures.append(("non-canonical", n, K))
    assert criterion(2, "Bier(B_n, I) = Bier_n(I), n <= 4", not failures, f"{checked} complexes"), failures[:5]


def blowup_matches(K, F) -> bool:
    v = ("apex",)
    sd = stellar_subdivision(K, F, v)
    rename = {G: (Blown(F, G - {v}) if v in G else Plain(G)) for G in sd.faces}
    return face_poset(sd).relabel(rename) == combinatorial_blowup(face_poset(K), F, validate=False)


def test_criterion_3_blowup_is_stellar_subdivision(criterion):
    failures = []
    exhaustive = 0
    for K in all_complexes(4):
        for F in K.sorted_faces():
            if F:
                exhaustive += 1
                if not blowup_matches(K, F):
                    failures.append((K, F))
    rng = random.Random(20240601)
    sampled = 0
    for _ in range(1000):
        K = random_complex(rng, max_vertices=7)
        faces = [F for F in K.sorted_faces() if F]
        # a vertex, a facet and a uniformly random face
        picks = {frozenset([rng.choice(sorted(K.vertices))]), rng.choice(K.facets), rng.choice(faces)}
        for F in picks:
            sampled += 1
            if not blowup_matches(K, F):
                failures.append((K, F))
    detail = f"{exhaustive} exhaustive pairs, {sampled} random pairs"
    assert criterion(3, "Bl_F(F(K)) = F(sd_F(K))", not failures, detail), failures[:5]


def test_criterion_4_nested_complex_identity(criterion):
    failures = []
    checked = 0
    for L in bier_family():
        for ideal in enumerate_proper_ideals(L):
            checked += 1
            rep = chain_nested_isomorphism(L, ideal)
            forward_ok = all(rep.f(A) in rep.chains and rep.f_inverse(rep.f(A)) == A for A in rep.nested.faces)
            backward_ok = all(rep.f_inverse(C) in rep.nested and rep.f(rep.f_inverse(C)) == C for C in rep.chains.faces)
            if not (forward_ok and backward_ok and rep.nested.num_faces() == rep.chains.num_faces()):
                failures.append((L, ideal))
    assert criterion(4, "N(G) = Delta(L-bar) via f", not failures, f"{checked} (L, I) pairs"), failures[:5]


def test_criterion_5_subdivision_chain(criterion):
    failures = []
    checked = steps = 0
    for L in bier_family():
        for ideal in enumerate_proper_ideals(L):
            checked += 1
            rec = bier_subdivision_chain(L, ideal, verify=True)
            host = bier_host(L, ideal)
            target = order_complex(host.without([host.bottom()]))
            steps += len(rec.steps)
            if rec.final != target or len(rec.extensions) != len(rec.steps):
                failures.append((L, ideal))
    detail = f"{checked} chains, {steps} verified steps"
    assert criterion(5, "subdivision chain ends at Delta(Bier-bar)", not failures, detail), failures[:5]


def test_criterion_6_shelling_transport(criterion):
    start = time.monotonic()
    failures = []
    complexes = pairs = 0
    for K in complex_iso_classes(6, 6):
        if K.dim < 0:
            continue
        base = find_shelling(K)
        if base is None:
            continue
        complexes += 1
        for alpha in K.sorted_faces():
            if not alpha:
                continue
            pairs += 1
            out = transport_ordering(K, base.ordering, alpha)
            sd = stellar_subdivision(K, alpha)
            if not check_condition_T(face_lattice(sd), out.facets):
                failures.append(("T", K, alpha))
            if find_shelling(sd) is None:
                failures.append(("search", K, alpha))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 600
    detail = f"{complexes} shellable classes, {pairs} (K, alpha) pairs, {elapsed:.1f}s"
    assert criterion(6, "transported orderings satisfy (T)", ok, detail), failures[:5]


def test_criterion_7_criterion_equivalences(criterion):
    failures = []
    complexes = orderings = 0
    for K in complex_iso_classes(6, 5):
        if K.dim < 0:
            continue
        complexes += 1
        L = face_lattice(K)
        oracle = False
        for order in permutations(K.facets):
            orderings += 1
            t = bool(check_condition_T(L, order))
            if t != bool(check_condition_S(L, order)):
                failures.append(("S vs T", K, order))
            if is_shelling_bruteforce(order):
                oracle = True
        certified = find_shelling(K) is not None
        rco = find_recursive_coatom_ordering(L) is not None
        if not (oracle == certified == rco):
            failures.append(("shellable", K, oracle, certified, rco))
    detail = f"{complexes} classes, {orderings} coatom orderings"
    assert criterion(7, "(S) <=> (T); shellable <=> certified", not failures, detail), failures[:5]


def test_criterion_8_semilattice_closure(criterion):
    failures = []
    checked = 0
    for K in all_complexes(4):
        P = face_poset(K)
        for alpha in K.sorted_faces():
            if not alpha:
                continue
            checked += 1
            Bl = combinatorial_blowup(P, alpha, validate=False)
            if not Bl.is_meet_semilattice():
                failures.append(("semilattice", K, alpha))
                continue
            for a in Bl.elements:
                for b in Bl.elements:
                    m = Bl.meet(a, b)
                    if isinstance(a, Blown) and isinstance(b, Blown):
                        want = Blown(alpha, a.x & b.x)
                    else:
                        want = Plain(a.x & b.x)
                    if m != want:
                        failures.append(("meet", K, alpha, a, b))
    assert criterion(8, "Bl_alpha keeps meets", not failures, f"{checked} blowups"), failures[:5]


def test_criterion_9_iterated_spheres(criterion, tmp_path, capsys):
    seed = tmp_path / "triangle.json"
    write_json(seed, {"facets": sorted(map(sorted, simplex_boundary([1, 2, 3]).facets))})
    code = main(["iterate", "--seed-complex", str(seed), "--rounds", "2"])
    report = json.loads(capsys.readouterr().out)
    failures = []
    counts = [3]
    for r in report.get("rounds", []):
        K = complex_from_json(r["complex"])
        counts.append(len(K.vertices))
        if not K.reduced_homology().is_sphere(1):
            failures.append(("homology", r["round"]))
        order = [frozenset(f) for f in r["shelling_order"]]
        if sorted(order, key=sorted) != sorted(K.facets, key=sorted) or not check_shelling_order(order):
            failures.append(("shelling", r["round"]))
        if not r["shelling_certified"]:
            failures.append(("certificate", r["round"]))
    increasing = all(a < b for a, b in zip(counts, counts[1:]))
    ok = code == 0 and len(counts) == 3 and increasing and not failures
    detail = f"vertex counts {counts}"
    assert criterion(9, "iterated Bier spheres from the triangle", ok, detail), failures[:5]
