"""Simple closure analysis: equality-constrained (bidirectional) flows.

Two interchangeable algorithms are provided.  ``analyze_sca_naive``
iterates the abstract evaluator with bidirectional updates until nothing
changes; it is the equality constraints run directly and stays around as
the oracle.  ``analyze_sca_unionfind`` solves the same
equalities by merging flow classes with a union-find table, re-examining
an application site whenever its operator class gains abstractions, which
makes it near linear in the program size.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Optional

from .cache import Cache, key_order
from .cfa0 import _require_stack
from .syntax import Abs, Ref, Term, abs_id, labels_of, preorder


def analyze_sca_naive(
    program: Term, *, on_pass: Optional[Callable[[Cache], None]] = None
) -> Cache:
    """Fixed-point iteration of the bidirectional abstract evaluator."""
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

    def link(a, b) -> None:
        # Both sides end up holding the union of their current contents.
        join(a, entries[b])
        join(b, entries[a])

    def visit(e: Term, in_progress: set) -> None:
        if e.label in in_progress:
            return
        in_progress.add(e.label)
        try:
            if isinstance(e, Ref):
                link(e.label, e.name)
            elif isinstance(e, Abs):
                join(e.label, {abs_id(e)})
            else:
                visit(e.fn, in_progress)
                visit(e.arg, in_progress)
                for value in sorted(entries[e.fn.label]):
                    node = index[value]
                    link(node.binder, e.arg.label)
                    visit(node.body, in_progress)
                    link(e.label, node.body.label)
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


class _UnionFind:
    def __init__(self, keys):
        self.parent = {k: k for k in keys}
        self.size = {k: 1 for k in keys}

    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root


def analyze_sca_unionfind(program: Term) -> Cache:
    """Union-find solver; extensionally equal to ``analyze_sca_naive``.

    Program points are activated on demand, mirroring the abstract
    evaluator: an abstraction body only contributes constraints once the
    abstraction reaches some operator class.  Each (site, abstraction)
    pair is handled once, so work is near linear in the program size.
    """
    keys = labels_of(program)
    uf = _UnionFind(keys)
    index = {abs_id(n): n for n in preorder(program) if isinstance(n, Abs)}

    values: dict = {}  # root -> set of AbsId
    sites_at: dict = {}  # root -> set of site indices
    sites: list = []  # (operator label, operand label, application label)
    processed: list = []  # per site, abstractions already handled there
    activated: set = set()
    worklist: deque = deque()
    queued: set = set()

    def enqueue(i: int) -> None:
        if i not in queued:
            queued.add(i)
            worklist.append(i)

    def union(a, b) -> None:
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            return
        if uf.size[ra] < uf.size[rb]:
            ra, rb = rb, ra
        va = values.get(ra, set())
        vb = values.get(rb, set())
        gained_a = not vb <= va
        gained_b = not va <= vb
        uf.parent[rb] = ra
        uf.size[ra] += uf.size[rb]
        if len(va) < len(vb):
            va, vb = vb, va
        va |= vb
        if va:
            values[ra] = va
        values.pop(rb, None)
        sa = sites_at.pop(ra, set())
        sb = sites_at.pop(rb, set())
        if sa or sb:
            sites_at[ra] = sa | sb
        if gained_a:
            for i in sa:
                enqueue(i)
        if gained_b:
            for i in sb:
                enqueue(i)

    def seed(node: Abs) -> None:
        # A class gaining a value must re-examine its application sites,
        # whether the gain comes from a merge or from seeding a newly
        # activated abstraction into an existing class.
        root = uf.find(node.label)
        pool = values.setdefault(root, set())
        value = abs_id(node)
        if value not in pool:
            pool.add(value)
            for i in sites_at.get(root, ()):
                enqueue(i)

    def activate(root: Term) -> None:
        stack = [root]
        while stack:
            node = stack.pop()
            if node.label in activated:
                continue
            activated.add(node.label)
            if isinstance(node, Ref):
                union(node.name, node.label)
            elif isinstance(node, Abs):
                seed(node)
            else:
                i = len(sites)
                sites.append((node.fn.label, node.arg.label, node.label))
                processed.append(set())
                sites_at.setdefault(uf.find(node.fn.label), set()).add(i)
                enqueue(i)
                stack.append(node.arg)
                stack.append(node.fn)

    activate(program)
    while worklist:
        i = worklist.popleft()
        queued.discard(i)
        fn_label, arg_label, app_label = sites[i]
        avail = values.get(uf.find(fn_label), set())
        fresh = avail - processed[i]
        for value in sorted(fresh):
            processed[i].add(value)
            node = index[value]
            union(node.binder, arg_label)
            union(node.body.label, app_label)
            activate(node.body)

    return Cache(
        {k: frozenset(values.get(uf.find(k), ())) for k in sorted(keys, key=key_order)}
    )


def accepts_sca(cache: Cache, program: Term) -> bool:
    """Check the equality-flow constraints directly against ``cache``."""
    index = {abs_id(n): n for n in preorder(program) if isinstance(n, Abs)}
    _require_stack(len(labels_of(program)))
    assumed: set = set()

    def check(e: Term) -> bool:
        if e.label in assumed:
            return True
        assumed.add(e.label)
        if isinstance(e, Ref):
            return cache.get(e.name) == cache.get(e.label)
        if isinstance(e, Abs):
            return abs_id(e) in cache.get(e.label)
        if not check(e.fn) or not check(e.arg):
            return False
        for value in sorted(cache.get(e.fn.label)):
            node = index.get(value)
            if node is None:
                raise ValueError(f"cache value {value} does not occur in the program")
            if cache.get(e.arg.label) != cache.get(node.binder):
                return False
            if cache.get(node.body.label) != cache.get(e.label):
                return False
            if not check(node.body):
                return False
        return True

    return check(program)
