"""Command-line front end.

Exit codes: 0 success, 2 input validation, 3 mathematical verification
failure, 4 timeout.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bier import bier_poset
from .errors import BierlabError, NotIdeal, SizeTooLarge, Timeout, TooLarge
from .homology import max_faces
from .io import (
    complex_from_json,
    complex_to_json,
    dumps,
    ideal_from_json,
    ideal_to_json,
    parse_set_family,
    poset_from_json,
    poset_to_json,
    read_json,
    write_json,
)
from .labels import canon, sort_key, sorted_labels
from .nested import bier_subdivision_chain, subdivision_edges
from .poset import boolean_lattice, enumerate_proper_ideals, order_complex
from .shelling import (
    DEFAULT_TIMEOUT,
    bier_shelling_pipeline,
    find_shelling,
    replay_certificate,
    transport_ordering,
)
from .simplicial import (
    SimplicialComplex,
    default_vertex,
    deleted_join_bier,
    face_lattice,
    is_pseudomanifold,
    stellar_subdivision,
)

MAX_SWEEP_N = 5


@dataclass
class JobSpec:
    command: str
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    def config_hash(self) -> str:
        payload = json.dumps({"command": self.command, "inputs": self.inputs, "params": self.params}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


class InputError(BierlabError):
    pass


# input helpers


def _load(path: str, kind: str):
    p = Path(path)
    if not p.exists():
        raise InputError(f"{kind} file {path} does not exist")
    try:
        return read_json(p)
    except json.JSONDecodeError as exc:
        raise InputError(f"{kind} file {path} is not valid JSON: {exc}") from None


def _boolean_ideal(n: int, args) -> frozenset:
    Bn = boolean_lattice(n)
    if getattr(args, "facets", None):
        K = complex_from_json(_load(args.facets, "complex"))
        members = frozenset(K.faces)
    elif getattr(args, "generators", None) is not None:
        members = Bn.ideal_generated_by(_check_subsets(n, parse_set_family(args.generators)))
    elif getattr(args, "ideal", None) is not None:
        members = frozenset(_check_subsets(n, parse_set_family(args.ideal)))
    else:
        raise InputError("an ideal is required (--ideal, --generators or --facets)")
    return Bn.check_proper_ideal(_check_subsets(n, members))


def _check_subsets(n: int, sets):
    ground = set(range(1, n + 1))
    for s in sets:
        if not s <= ground:
            raise NotIdeal(f"{canon(s)} is not a subset of 1..{n}")
    return sets


def _lattice_and_ideal(args):
    if args.boolean is not None:
        if args.boolean < 0 or args.boolean > MAX_SWEEP_N + 1:
            raise SizeTooLarge(f"--boolean must be between 0 and {MAX_SWEEP_N + 1}")
        return boolean_lattice(args.boolean), _boolean_ideal(args.boolean, args)
    path = getattr(args, "lattice", None) or getattr(args, "poset", None)
    if not path:
        raise InputError("give --boolean N or a poset/lattice file")
    P = poset_from_json(_load(path, "poset"))
    ideal_file = getattr(args, "ideal_file", None)
    if not ideal_file and getattr(args, "ideal", None) and Path(args.ideal).is_file():
        ideal_file = args.ideal
    if ideal_file:
        members = ideal_from_json(_load(ideal_file, "ideal"))
    elif getattr(args, "generators", None):
        members = P.ideal_generated_by(_labels_in(P, args.generators))
    elif getattr(args, "ideal", None):
        members = frozenset(_labels_in(P, args.ideal))
    else:
        raise InputError("an ideal is required (--ideal-file, --ideal or --generators)")
    return P, P.check_proper_ideal(members)


def _labels_in(P, text: str) -> list:
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        hits = [x for x in P.elements if canon(x) == tok]
        if not hits:
            raise InputError(f"unknown element {tok!r}")
        out.append(hits[0])
    return out


def _base_report(job: JobSpec) -> dict:
    return {"command": job.command, "version": __version__, "config_hash": job.config_hash()}


# commands


def cmd_bier(args, job: JobSpec) -> tuple[dict, int]:
    P, ideal = _lattice_and_ideal(args)
    B = bier_poset(P, ideal)
    report = _base_report(job)
    report.update(
        {
            "elements": len(B),
            "proper_part": len(B) - 2,
            "is_lattice": B.is_lattice(),
            "ideal": ideal_to_json(ideal),
        }
    )
    if args.output:
        write_json(args.output, poset_to_json(B))
        report["output"] = args.output
    else:
        report["poset"] = poset_to_json(B)
    return report, 0


def sphere_check(n: int, ideal: frozenset, shell: bool = False, timeout: float | None = None) -> dict:
    """Sphere certificate for Bier(B_n, I): vertex bound, pseudomanifold, homology, optional shelling."""
    key = canon(frozenset(ideal))
    try:
        Bn = boolean_lattice(n)
        B = bier_poset(Bn, ideal)
        atoms = len(B.upper_covers(B.bottom()))
        proper = order_complex(B.proper_part()) if len(B) > 2 else SimplicialComplex([frozenset()])
        pm, reason = is_pseudomanifold(proper)
        H = proper.reduced_homology()
        joined = deleted_join_bier(SimplicialComplex(ideal), n)
        out = {
            "ideal": key,
            "sphere_vertices": atoms,
            "deleted_join_vertices": len(joined.vertices),
            "vertex_bound_ok": atoms <= 2 * n and len(joined.vertices) <= 2 * n,
            "pseudomanifold": pm,
            "pseudomanifold_reason": reason,
            "homology": H.to_json(),
            "homology_ok": H.is_sphere(n - 2),
        }
        ok = out["vertex_bound_ok"] and pm and out["homology_ok"]
        if shell:
            rep = bier_shelling_pipeline(Bn, ideal, timeout=timeout)
            out["shelling_steps"] = len(rep.steps)
            out["shelling_ok"] = rep.replay()
            ok = ok and out["shelling_ok"]
        out["status"] = "pass" if ok else "fail"
    except Timeout as exc:
        out = {"ideal": key, "status": "timeout", "message": str(exc)}
    except BierlabError as exc:
        out = {"ideal": key, "status": "fail", "error": exc.code, "message": str(exc)}
    return out


def _sphere_job(payload):
    return sphere_check(*payload)


def cmd_verify_sphere(args, job: JobSpec) -> tuple[dict, int]:
    n = args.boolean
    if n is None:
        raise InputError("verify-sphere needs --boolean N")
    if n < 1 or n > args.max_n:
        raise SizeTooLarge(f"n must be in [1, {args.max_n}]")
    if args.all_ideals:
        ideals = list(enumerate_proper_ideals(boolean_lattice(n)))
    else:
        ideals = [_boolean_ideal(n, args)]
    payloads = [(n, I, args.shell, args.timeout) for I in ideals]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sphere_job, payloads))
    else:
        results = [_sphere_job(p) for p in payloads]
    results.sort(key=lambda r: r["ideal"])
    report = _base_report(job)
    failed = sum(r["status"] == "fail" for r in results)
    timed_out = sum(r["status"] == "timeout" for r in results)
    report.update(
        {
            "n": n,
            "ideals": len(results),
            "passed": sum(r["status"] == "pass" for r in results),
            "failed": failed,
            "timeouts": timed_out,
            "results": results,
        }
    )
    report["status"] = "pass" if not failed and not timed_out else "fail"
    code = 3 if failed else 4 if timed_out else 0
    return report, code


def cmd_chain(args, job: JobSpec) -> tuple[dict, int]:
    L, ideal = _lattice_and_ideal(args)
    rec = bier_subdivision_chain(L, ideal, verify=not args.no_verify, keep_intermediate=args.emit_steps)
    body = rec.to_json()
    if args.emit_steps:
        for step, K in zip(body["steps"], rec.intermediates):
            step["complex"] = complex_to_json(K)
    report = _base_report(job)
    report.update(
        {
            "initial_f_vector": list(rec.initial.f_vector()),
            "final_f_vector": list(rec.final.f_vector()),
            "matches_bier": True,
            "steps": body["steps"],
        }
    )
    if args.output:
        write_json(args.output, body)
        report["output"] = args.output
    else:
        report["final"] = body["final"]
    return report, 0


def cmd_shell(args, job: JobSpec) -> tuple[dict, int]:
    report = _base_report(job)
    if args.pipeline:
        L, ideal = _lattice_and_ideal(args)
        rep = bier_shelling_pipeline(L, ideal, timeout=args.timeout)
        report.update(rep.to_json())
        report["steps"] = len(rep.steps)
        report["replay_ok"] = rep.replay()
        report["homology"] = rep.complex.reduced_homology().to_json()
        report["f_vector"] = list(rep.complex.f_vector())
        return report, 0 if report["replay_ok"] else 3
    if not args.complex:
        raise InputError("shell needs --complex FILE or --pipeline")
    K = complex_from_json(_load(args.complex, "complex"))
    if K.num_faces() > max_faces():
        raise TooLarge("complex exceeds BIERLAB_MAX_FACES")
    base = find_shelling(K, timeout=args.timeout)
    if base is None:
        report.update({"shellable": False, "verdict": "not shellable"})
        return report, 0 if not args.transport else 3
    if not args.transport:
        report.update({"shellable": True})
        report.update(base.to_json())
        return report, 0
    alphas = parse_set_family(args.transport)
    if len(alphas) != 1:
        raise InputError("--transport takes exactly one face")
    alpha = alphas[0]
    new_vertex = args.new_vertex or default_vertex(alpha)
    out = transport_ordering(K, base.ordering, alpha, new_vertex)
    sd = stellar_subdivision(K, alpha, new_vertex)
    report.update({"shellable": True, "base_order": base.to_json()["order"], "criterion": "T"})
    report.update(out.to_json())
    report["subdivision"] = complex_to_json(sd)
    report["replay_ok"] = replay_certificate(K, base.ordering, alpha, new_vertex, out)
    return report, 0


def _principal_candidates(L) -> list:
    bottom, top = L.bottom(), L.top()
    proper = [x for x in L.elements if x != bottom and x != top]
    useful = [x for x in proper if any(y != top for y in L.up_set(x) if y != x)]
    return useful or proper


def pick_ideal(L, policy: str, rng: random.Random) -> frozenset:
    """Principal ideal ``L_{≤x}`` chosen by policy among those giving at least one subdivision edge."""
    cands = _principal_candidates(L)
    if not cands:
        return frozenset([L.bottom()])
    by_size = sorted(cands, key=lambda x: (len(L.down_set(x)), sort_key(x)))
    if policy == "smallest":
        x = by_size[0]
    elif policy == "largest":
        x = max(by_size, key=lambda x: len(L.down_set(x)))
    else:
        x = rng.choice(by_size)
    return frozenset(L.down_set(x))


def cmd_iterate(args, job: JobSpec) -> tuple[dict, int]:
    if args.rounds < 1:
        raise InputError("--rounds must be at least 1")
    K = complex_from_json(_load(args.seed_complex, "complex"))
    rng = random.Random(args.seed)
    seed_h = K.reduced_homology()
    catalog = []
    code = 0
    for r in range(1, args.rounds + 1):
        L = face_lattice(K)
        ideal = pick_ideal(L, args.ideal_policy, rng)
        edges = subdivision_edges(L, ideal)
        rep = bier_shelling_pipeline(L, ideal, timeout=args.timeout, verify_chain=not args.no_verify)
        new = rep.complex
        if new.num_faces() > max_faces():
            raise TooLarge(f"round {r} produced {new.num_faces()} faces, above BIERLAB_MAX_FACES")
        H = new.reduced_homology()
        # renumber vertices 1..N; the old names are kept as provenance
        names = sorted_labels(new.vertices)
        mapping = {v: i + 1 for i, v in enumerate(names)}
        renamed = new.relabel(mapping)
        order = [sorted(mapping[v] for v in f) for f in rep.ordering.facets]
        entry = {
            "round": r,
            "parent_vertices": len(K.vertices),
            "vertices": len(renamed.vertices),
            "f_vector": list(renamed.f_vector()),
            "ideal": [canon(x) for x in sorted_labels(ideal)],
            "subdivided_edges": len(edges),
            "homology": H.to_json(),
            "homology_matches_seed": H == seed_h,
            "shelling_certified": rep.replay(),
            "shelling_order": order,
            "complex": complex_to_json(renamed),
            "vertex_names": [canon(v) for v in names],
        }
        if not (entry["homology_matches_seed"] and entry["shelling_certified"]):
            code = 3
        catalog.append(entry)
        K = renamed
    report = _base_report(job)
    report.update({"policy": args.ideal_policy, "seed": args.seed, "rounds": catalog})
    if args.output:
        write_json(args.output, {"rounds": catalog})
        report["output"] = args.output
    return report, code


# argument parsing


def _add_ideal_args(p, lattice_flag: str):
    p.add_argument("--boolean", type=int, help="use the boolean lattice B_n")
    p.add_argument(lattice_flag, help="poset/lattice JSON file")
    p.add_argument("--ideal", help="explicit ideal members, e.g. '∅,{1}' (or labels for a poset file)")
    p.add_argument("--generators", help="ideal generated by these faces/elements")
    p.add_argument("--ideal-file", help="ideal JSON file {\"members\": [...]}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bierlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bierlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bier", help="build Bier(P, I)")
    _add_ideal_args(p, "--poset")
    p.add_argument("--facets", help="complex JSON whose faces form the ideal of B_n")
    p.add_argument("-o", "--output")

    p = sub.add_parser("verify-sphere", help="certify Bier(B_n, I) spheres")
    p.add_argument("--boolean", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all-ideals", action="store_true")
    g.add_argument("--ideal")
    g.add_argument("--generators")
    p.add_argument("--facets")
    p.add_argument("--shell", action="store_true", help="also run the shelling pipeline")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-n", type=int, default=MAX_SWEEP_N)

    p = sub.add_parser("chain", help="subdivide Δ(L̄) into Δ(Bier(L, I)‾)")
    _add_ideal_args(p, "--lattice")
    p.add_argument("--emit-steps", action="store_true")
    p.add_argument("--no-verify", action="store_true", help="skip the per-step blowup identity")
    p.add_argument("-o", "--output")

    p = sub.add_parser("shell", help="find, transport or pipeline shellings")
    p.add_argument("--complex")
    p.add_argument("--transport", help="face to subdivide, e.g. '{1,2}'")
    p.add_argument("--new-vertex", help="label of the subdivision vertex")
    p.add_argument("--pipeline", action="store_true")
    _add_ideal_args(p, "--lattice")

    p = sub.add_parser("iterate", help="iterate the Bier construction from a seed sphere")
    p.add_argument("--seed-complex", required=True)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--ideal-policy", choices=["smallest", "largest", "random"], default="smallest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("-o", "--output")

    for sp in sub.choices.values():
        sp.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
        sp.add_argument("--format", choices=["json", "text"], default="json")
    return parser


COMMANDS = {
    "bier": cmd_bier,
    "verify-sphere": cmd_verify_sphere,
    "chain": cmd_chain,
    "shell": cmd_shell,
    "iterate": cmd_iterate,
}

_PATH_KEYS = ("poset", "lattice", "ideal_file", "facets", "complex", "seed_complex")


def _job_from_args(args) -> JobSpec:
    params = {k: v for k, v in vars(args).items() if k not in _PATH_KEYS + ("command", "output", "format")}
    inputs = {}
    for k in _PATH_KEYS:
        path = getattr(args, k, None)
        if path:
            if not Path(path).exists():
                raise InputError(f"input file {path} does not exist")
            inputs[k] = hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
    return JobSpec(args.command, inputs, params, getattr(args, "output", None), args.format)


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    lines = []
    for k, v in report.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True, ensure_ascii=False)
            if len(v) > 200:
                v = v[:197] + "..."
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "json")
    try:
        job = _job_from_args(args)
        report, code = COMMANDS[args.command](args, job)
    except BierlabError as exc:
        sys.stdout.write(_render(exc.to_json(), fmt))
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        sys.stdout.write(_render({"error": "InvalidInput", "message": str(exc)}, fmt))
        return 2
    sys.stdout.write(_render(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
