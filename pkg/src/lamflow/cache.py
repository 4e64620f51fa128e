"""Flow caches: the result tables produced by the analyses.

A cache maps every program point (label) and every variable name to the
set of abstractions that may flow there.  The bounded analysis uses the
same table with a distinguished ``UNKNOWN`` entry standing for "all
abstractions of the program".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .syntax import AbsId, LabelOrVar


class _UnknownType:
    """Absorbing flow set meaning every abstraction in the program."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _UnknownType()

FlowSet = frozenset
BoundedFlowSet = Union[frozenset, _UnknownType]


def key_order(key: LabelOrVar) -> tuple:
    """Sort labels numerically first, then variable names alphabetically."""
    if isinstance(key, int):
        return (0, key, "")
    return (1, 0, key)


def _format_flow_set(values: Iterable[AbsId]) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


@dataclass(frozen=True)
class Cache:
    """Finished analysis result; not to be mutated after construction."""

    entries: Mapping[LabelOrVar, frozenset]

    def get(self, key: LabelOrVar) -> frozenset:
        return self.entries.get(key, frozenset())

    def keys(self) -> frozenset:
        return frozenset(self.entries)

    def sorted_keys(self) -> list[LabelOrVar]:
        return sorted(self.entries, key=key_order)

    def to_table(self) -> str:
        lines = [
            f"{key} = {_format_flow_set(self.entries[key])}"
            for key in self.sorted_keys()
        ]
        return "\n".join(lines)

    def to_json_obj(self) -> dict:
        return {
            str(key): [
                {"label": v.label, "binder": v.binder}
                for v in sorted(self.entries[key])
            ]
            for key in self.sorted_keys()
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


@dataclass(frozen=True)
class BoundedCache:
    """Analysis result where overflowing entries collapsed to UNKNOWN.

    ``update_counts`` records how many strict enlargements each point saw;
    a point staying concrete never exceeded the analysis bound.
    """

    entries: Mapping[LabelOrVar, BoundedFlowSet]
    update_counts: Mapping[LabelOrVar, int]

    def get(self, key: LabelOrVar) -> BoundedFlowSet:
        return self.entries.get(key, frozenset())

    def sorted_keys(self) -> list[LabelOrVar]:
        return sorted(self.entries, key=key_order)

    def has_unknown(self) -> bool:
        return any(v is UNKNOWN for v in self.entries.values())

    def to_table(self) -> str:
        lines = []
        for key in self.sorted_keys():
            value = self.entries[key]
            text = "unknown" if value is UNKNOWN else _format_flow_set(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines)

    def to_json_obj(self) -> dict:
        obj: dict = {}
        for key in self.sorted_keys():
            value = self.entries[key]
            if value is UNKNOWN:
                obj[str(key)] = {"unknown": True}
            else:
                obj[str(key)] = [
                    {"label": v.label, "binder": v.binder} for v in sorted(value)
                ]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


def cache_leq(a: Cache, b: Cache) -> bool:
    """Pointwise containment: every flow of ``a`` is a flow of ``b``."""
    for key in set(a.entries) | set(b.entries):
        if not a.get(key) <= b.get(key):
            return False
    return True
