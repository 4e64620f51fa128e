"""Bounded-update flow analysis (the sub-0CFA family).

Runs the same abstract evaluator as 0CFA, but each program point tolerates
only ``bound`` strict enlargements of its flow set; one more growth event
collapses the point to UNKNOWN, standing for all abstractions of the
program.  UNKNOWN is absorbing and propagates as a marker; it is only
expanded when an UNKNOWN set sits in operator position, where every
abstraction of the program is applied.

On linear programs no point is ever updated twice, so any bound yields
exactly the 0CFA result.
"""

from __future__ import annotations

from .cache import UNKNOWN, BoundedCache, Cache, key_order
from .cfa0 import _require_stack
from .syntax import Abs, Ref, Term, abs_id, abstractions, labels_of, preorder


def analyze_sub0cfa(program: Term, bound: int) -> BoundedCache:
    """Run the bounded abstract evaluator to its fixed point."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    keys = labels_of(program)
    state: dict = {k: frozenset() for k in sorted(keys, key=key_order)}
    counts: dict = {k: 0 for k in state}
    index = {abs_id(n): n for n in preorder(program) if isinstance(n, Abs)}
    all_values = sorted(index)
    changed = [0]
    _require_stack(len(keys))

    def join(key, incoming) -> None:
        cur = state[key]
        if cur is UNKNOWN:
            return
        if incoming is UNKNOWN:
            state[key] = UNKNOWN
            counts[key] += 1
            changed[0] += 1
            return
        merged = cur | incoming
        if merged != cur:
            counts[key] += 1
            changed[0] += 1
            state[key] = UNKNOWN if counts[key] > bound else merged

    def visit(e: Term, in_progress: set) -> None:
        if e.label in in_progress:
            return
        in_progress.add(e.label)
        try:
            if isinstance(e, Ref):
                join(e.label, state[e.name])
            elif isinstance(e, Abs):
                join(e.label, frozenset({abs_id(e)}))
            else:
                visit(e.fn, in_progress)
                visit(e.arg, in_progress)
                operator = state[e.fn.label]
                flowing = all_values if operator is UNKNOWN else sorted(operator)
                for value in flowing:
                    node = index[value]
                    join(node.binder, state[e.arg.label])
                    visit(node.body, in_progress)
                    join(e.label, state[node.body.label])
        finally:
            in_progress.discard(e.label)

    while True:
        before = changed[0]
        visit(program, set())
        if changed[0] == before:
            break
    return BoundedCache(dict(state), dict(counts))


def concretize(bounded: BoundedCache, program: Term) -> Cache:
    """Replace UNKNOWN entries with the set of all program abstractions."""
    everything = frozenset(abstractions(program))
    return Cache(
        {
            k: everything if v is UNKNOWN else v
            for k, v in bounded.entries.items()
        }
    )
