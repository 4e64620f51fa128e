"""0CFA: subset-constrained monovariant flow analysis.

``analyze_0cfa`` runs the abstract evaluator over the program repeatedly
until the cache stops growing, yielding the least table that satisfies the
flow constraints.  ``accepts_0cfa`` checks an arbitrary cache against the
constraints directly and is kept as an independent oracle for the
analyzer.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, Optional

from .cache import Cache, key_order
from .syntax import (
    Abs,
    AbsId,
    Ref,
    Term,
    abs_id,
    abstractions,
    labels_of,
    preorder,
)


def _require_stack(n_labels: int) -> None:
    # The abstract evaluator recurses through subterms and into the bodies
    # of flowing abstractions; depth is bounded by the number of labels.
    needed = 3 * n_labels + 500
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)


@dataclass(frozen=True)
class FlowQuery:
    """Does ``target`` flow to program point ``at`` in ``program``?"""

    program: Term
    target: AbsId
    at: int

    def __post_init__(self):
        if self.target not in abstractions(self.program):
            raise ValueError(f"{self.target} is not an abstraction of the program")
        if self.at not in labels_of(self.program):
            raise ValueError(f"label {self.at} does not occur in the program")


def flow_query(cache: Cache, query: FlowQuery) -> bool:
    return query.target in cache.get(query.at)


def analyze_0cfa(
    program: Term, *, on_pass: Optional[Callable[[Cache], None]] = None
) -> Cache:
    """Compute the least 0CFA cache of a closed program.

    ``on_pass`` receives a snapshot after each full sweep; snapshots grow
    monotonically until the fixed point.
    """
    keys = labels_of(program)
    entries: dict = {k: set() for k in sorted(keys, key=key_order)}
    index = {abs_id(n): n for n in preorder(program) if isinstance(n, Abs)}
    growth = [0]
    budget = len(keys) * max(len(index), 1)
    _require_stack(len(keys))

    def join(key, values) -> None:
        cur = entries[key]
        before = len(cur)
        cur |= values
        if len(cur) != before:
            growth[0] += 1
            assert growth[0] <= budget, "cache updates exceeded the polynomial bound"

    def visit(e: Term, in_progress: set) -> None:
        # Re-entering a label already on the stack would loop forever
        # without changing the cache, so it is skipped.
        if e.label in in_progress:
            return
        in_progress.add(e.label)
        try:
            if isinstance(e, Ref):
                join(e.label, entries[e.name])
            elif isinstance(e, Abs):
                join(e.label, {abs_id(e)})
            else:
                visit(e.fn, in_progress)
                visit(e.arg, in_progress)
                for value in sorted(entries[e.fn.label]):
                    node = index[value]
                    join(node.binder, entries[e.arg.label])
                    visit(node.body, in_progress)
                    join(e.label, entries[node.body.label])
        finally:
            in_progress.discard(e.label)

    while True:
        before = growth[0]
        visit(program, set())
        if on_pass is not None:
            on_pass(Cache({k: frozenset(v) for k, v in entries.items()}))
        if growth[0] == before:
            break
    return Cache({k: frozenset(v) for k, v in entries.items()})


def accepts_0cfa(cache: Cache, program: Term) -> bool:
    """Check the subset-flow constraints directly against ``cache``.

    A judgment already under consideration is taken to hold, which makes
    the check terminate on self-referential flows.
    """
    index = {abs_id(n): n for n in preorder(program) if isinstance(n, Abs)}
    _require_stack(len(labels_of(program)))
    assumed: set = set()

    def check(e: Term) -> bool:
        if e.label in assumed:
            return True
        assumed.add(e.label)
        if isinstance(e, Ref):
            return cache.get(e.name) <= cache.get(e.label)
        if isinstance(e, Abs):
            return abs_id(e) in cache.get(e.label)
        if not check(e.fn) or not check(e.arg):
            return False
        for value in sorted(cache.get(e.fn.label)):
            node = index.get(value)
            if node is None:
                raise ValueError(f"cache value {value} does not occur in the program")
            if not cache.get(e.arg.label) <= cache.get(node.binder):
                return False
            if not cache.get(node.body.label) <= cache.get(e.label):
                return False
            if not check(node.body):
                return False
        return True

    return check(program)
