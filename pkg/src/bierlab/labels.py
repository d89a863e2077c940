"""Element labels: ordering, canonical serialization and JSON encoding.

Labels are arbitrary hashable tokens. Supported kinds are ``int``, ``str``,
``frozenset`` and ``tuple`` of labels, plus the structured tokens defined
here (``TOP``, :class:`Interval`, :class:`Plain`, :class:`Blown`,
:class:`Primed`). Every deterministic tie-break in the package uses
:func:`sort_key`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Hashable, Iterable

Label = Hashable


class _Top:
    """The adjoined top element; a process-wide singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())

    def _key(self):
        return (9,)

    def canon(self) -> str:
        return "TOP"

    def to_json(self):
        return "TOP"


TOP = _Top()


@dataclass(frozen=True)
class Interval:
    """Bier element ``[lo, hi]``: an interval of the host poset."""

    lo: Any
    hi: Any

    def __repr__(self):
        return f"[{canon(self.lo)}|{canon(self.hi)}]"

    def _key(self):
        return (4, sort_key(self.lo), sort_key(self.hi))

    def canon(self) -> str:
        return f"[{canon(self.lo)}|{canon(self.hi)}]"

    def to_json(self):
        return {"lo": label_to_json(self.lo), "hi": label_to_json(self.hi)}


@dataclass(frozen=True)
class Plain:
    """Blowup element carried over unchanged from the host semilattice."""

    x: Any

    def __repr__(self):
        return f"Plain({canon(self.x)})"

    def _key(self):
        return (6, sort_key(self.x))

    def canon(self) -> str:
        return canon(self.x)

    def to_json(self):
        return {"plain": label_to_json(self.x)}


@dataclass(frozen=True)
class Blown:
    """Blowup element ``[alpha, x]``."""

    alpha: Any
    x: Any

    def __repr__(self):
        return f"Blown({canon(self.alpha)}, {canon(self.x)})"

    def _key(self):
        return (7, sort_key(self.alpha), sort_key(self.x))

    def canon(self) -> str:
        return f"<{canon(self.alpha)}|{canon(self.x)}>"

    def to_json(self):
        return {"blown": [label_to_json(self.alpha), label_to_json(self.x)]}


@dataclass(frozen=True)
class Primed:
    """Second copy ``i'`` of a ground element, used by deleted joins."""

    base: Any

    def __repr__(self):
        return f"{canon(self.base)}'"

    def _key(self):
        return (5, sort_key(self.base))

    def canon(self) -> str:
        return f"{canon(self.base)}'"

    def to_json(self):
        return {"primed": label_to_json(self.base)}


@lru_cache(maxsize=None)
def sort_key(x: Label) -> tuple:
    """Total order on labels. Integers compare numerically, sets by size first."""
    if isinstance(x, bool):
        raise TypeError("bool is not a valid label")
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, frozenset):
        return (2, len(x), tuple(sorted(sort_key(m) for m in x)))
    if isinstance(x, tuple):
        return (3, tuple(sort_key(m) for m in x))
    key = getattr(x, "_key", None)
    if key is None:
        raise TypeError(f"unsupported label type {type(x).__name__}")
    return key()


@lru_cache(maxsize=None)
def canon(x: Label) -> str:
    """Canonical string form of a label."""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return x
    if isinstance(x, frozenset):
        return "{" + ",".join(canon(m) for m in sorted(x, key=sort_key)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(canon(m) for m in x) + ")"
    return x.canon()


def sorted_labels(xs: Iterable[Label]) -> list:
    return sorted(xs, key=sort_key)


def label_to_json(x: Label):
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    if isinstance(x, frozenset):
        return {"set": [label_to_json(m) for m in sorted_labels(x)]}
    if isinstance(x, tuple):
        return {"tuple": [label_to_json(m) for m in x]}
    return x.to_json()


def label_from_json(obj) -> Label:
    if obj == "TOP":
        return TOP
    if isinstance(obj, bool):
        raise ValueError("bool is not a valid label")
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, list):
        return tuple(label_from_json(m) for m in obj)
    if isinstance(obj, dict):
        if set(obj) == {"lo", "hi"}:
            return Interval(label_from_json(obj["lo"]), label_from_json(obj["hi"]))
        if set(obj) == {"set"}:
            return frozenset(label_from_json(m) for m in obj["set"])
        if set(obj) == {"tuple"}:
            return tuple(label_from_json(m) for m in obj["tuple"])
        if set(obj) == {"plain"}:
            return Plain(label_from_json(obj["plain"]))
        if set(obj) == {"blown"}:
            a, x = obj["blown"]
            return Blown(label_from_json(a), label_from_json(x))
        if set(obj) == {"primed"}:
            return Primed(label_from_json(obj["primed"]))
    raise ValueError(f"cannot decode label {obj!r}")
