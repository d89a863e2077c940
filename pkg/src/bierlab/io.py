"""JSON file formats and the compact set-family syntax used on the command line."""
from __future__ import annotations

import json
import re
from pathlib import Path

from .labels import label_from_json, label_to_json, sorted_labels
from .poset import Poset
from .simplicial import SimplicialComplex


def poset_to_json(P: Poset) -> dict:
    return {
        "elements": [label_to_json(x) for x in P.elements],
        "covers": [
            [label_to_json(a), label_to_json(b)]
            for a, b in sorted(P.covers, key=lambda c: (P.index[c[0]], P.index[c[1]]))
        ],
    }


def poset_from_json(obj: dict) -> Poset:
    elements = [label_from_json(x) for x in obj["elements"]]
    covers = [(label_from_json(a), label_from_json(b)) for a, b in obj["covers"]]
    return Poset.from_covers(elements, covers)


def ideal_to_json(members) -> dict:
    return {"members": [label_to_json(x) for x in sorted_labels(members)]}


def ideal_from_json(obj: dict) -> frozenset:
    return frozenset(label_from_json(x) for x in obj["members"])


def complex_to_json(K: SimplicialComplex) -> dict:
    out = K.to_json()
    if not out["void"]:
        out.pop("void")
    return out


def complex_from_json(obj: dict) -> SimplicialComplex:
    if obj.get("void"):
        return SimplicialComplex.void()
    facets = [[label_from_json(v) for v in f] for f in obj["facets"]]
    K = SimplicialComplex.from_facets(facets)
    declared = obj.get("vertices")
    if declared is not None:
        declared = {label_from_json(v) for v in declared}
        if declared != set(K.vertices):
            raise ValueError("declared vertices differ from the vertices used by facets")
    return K


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


_SET = re.compile(r"∅|\{[^{}]*\}")


def parse_set_family(text: str) -> list[frozenset]:
    """Parse ``'∅,{1},{1,2}'`` into frozensets; ``{}`` and ``∅`` both denote the empty set.

    Members inside braces are integers when they look like integers, strings otherwise.
    """
    text = text.strip()
    if not text:
        return []
    found = _SET.findall(text)
    leftover = _SET.sub("", text).replace(",", "").strip()
    if leftover:
        raise ValueError(f"cannot parse set family {text!r}")
    out = []
    for tok in found:
        if tok == "∅":
            out.append(frozenset())
            continue
        body = tok[1:-1].strip()
        items = [s.strip() for s in body.split(",") if s.strip()]
        out.append(frozenset(int(s) if re.fullmatch(r"-?\d+", s) else s for s in items))
    return out
