"""Environment-based evaluator with tightening, plus the size metric and
cache-respects relation used as oracles by the analysis tests.

The evaluator keeps each environment restricted to exactly the free
variables of the expression under evaluation.  On a linear program this
splits the environment between operator and operand at every application,
which is what makes evaluation and flow analysis interchangeable there.

Evaluation is partial: nonlinear programs may diverge, so every run
carries a fuel budget, spent one unit per application.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .cache import Cache
from .syntax import (
    Abs,
    Ref,
    Term,
    _free_counts,
    abs_id,
    free_vars,
    is_linear,
    labels_of,
    preorder,
    term_size,
)


class EvalError(Exception):
    pass


class UnboundVariableError(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class FuelExhaustedError(EvalError):
    def __init__(self, fuel: int):
        super().__init__(f"evaluation did not finish within {fuel} steps")
        self.fuel = fuel


@dataclass(frozen=True)
class Closure:
    """An abstraction paired with an environment that closes it."""

    term: Abs
    env: Mapping[str, "Closure"]


Env = Mapping[str, Closure]


def _restrict(env: Env, names: frozenset) -> dict:
    out = {}
    for name in names:
        try:
            out[name] = env[name]
        except KeyError:
            raise UnboundVariableError(name) from None
    return out


def _index_free_vars(term: Term, index: dict) -> None:
    # Labels are unique within a program, so one postorder pass gives a
    # free-variable table for every subterm the evaluator can reach.
    for label, counts in _free_counts(term).items():
        index[label] = frozenset(counts)


def evaluate(term: Term, env: Optional[Env] = None, fuel: Optional[int] = None) -> Closure:
    """Run the evaluator; raises on unbound variables or exhausted fuel.

    Default fuel is 10x the program size, plenty for any terminating
    linear program (those finish within fuel equal to their size).
    """
    env = {} if env is None else env
    if fuel is None:
        fuel = 10 * term_size(term)
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    fv_index: dict = {}
    _index_free_vars(term, fv_index)
    stack = list(env.values())
    while stack:
        closure = stack.pop()
        if closure.term.label not in fv_index:
            _index_free_vars(closure.term, fv_index)
        stack.extend(closure.env.values())
    budget = [fuel]
    return _eval(term, _restrict(env, fv_index[term.label]), budget, fuel, fv_index)


def _eval(term: Term, env: dict, budget: list, initial_fuel: int, fv: dict) -> Closure:
    # Tightening invariant: the environment covers exactly the free vars.
    assert set(env) == fv[term.label]
    if isinstance(term, Ref):
        assert len(env) == 1
        if term.name not in env:
            raise UnboundVariableError(term.name)
        return env[term.name]
    if isinstance(term, Abs):
        return Closure(term, env)
    if budget[0] <= 0:
        raise FuelExhaustedError(initial_fuel)
    budget[0] -= 1
    fn_clo = _eval(term.fn, _restrict(env, fv[term.fn.label]), budget, initial_fuel, fv)
    arg_clo = _eval(term.arg, _restrict(env, fv[term.arg.label]), budget, initial_fuel, fv)
    body = fn_clo.term.body
    extended = dict(fn_clo.env)
    extended[fn_clo.term.binder] = arg_clo
    return _eval(body, _restrict(extended, fv[body.label]), budget, initial_fuel, fv)


# ---------------------------------------------------------------------------
# Sizes


def env_size(env: Env) -> int:
    """Number of bindings plus the sizes of the bound closures."""
    return len(env) + sum(closure_size(c) for c in env.values())


def closure_size(closure: Closure) -> int:
    """Size of a closure: term node count plus environment size."""
    return term_size(closure.term) + env_size(closure.env)


def config_size(term: Term, env: Env) -> int:
    """Size of an arbitrary (term, environment) pair fed to the evaluator."""
    return term_size(term) + env_size(env)


# ---------------------------------------------------------------------------
# Linear-closure discipline


def _closure_var_names(closure: Closure) -> set:
    names: set = set()
    stack = [closure]
    while stack:
        c = stack.pop()
        for node in preorder(c.term):
            if isinstance(node, Ref):
                names.add(node.name)
            elif isinstance(node, Abs):
                names.add(node.binder)
        for var, sub in c.env.items():
            names.add(var)
            stack.append(sub)
    return names


def linearly_closes(term: Term, env: Env) -> bool:
    """Whether ``env`` closes a linear ``term`` under the linear discipline.

    The domain must be exactly the free variables, each occurring once;
    bound closures must themselves be linear; and no variable of the
    domain may occur anywhere inside any bound closure.
    """
    if not is_linear(term):
        return False
    counts = _free_counts(term)[term.label]
    if set(env) != set(counts):
        return False
    for name in counts:
        if counts[name] != 1:
            return False
    for other in env.values():
        if not isinstance(other.term, Abs):
            return False
        if not linearly_closes(other.term, other.env):
            return False
    for name in env:
        for other in env.values():
            if name in _closure_var_names(other):
                return False
    return True


def respects(cache: Cache, closure: Closure) -> bool:
    """Whether ``cache`` records exactly the bindings of ``closure``.

    Holds when the environment linearly closes the term, every binding
    ``x -> <t', r'>`` appears in the cache as the singleton ``{t'}`` (with
    the relation holding recursively), and the cache is empty at every
    label inside the term and at every non-free variable name.  The
    closure's term is a value, not a program point, so its own outermost
    label is not constrained.
    """
    seen: set = set()

    def check(c: Closure) -> bool:
        if id(c) in seen:
            return True
        seen.add(id(c))
        if not linearly_closes(c.term, c.env):
            return False
        for name, bound in c.env.items():
            if cache.get(name) != frozenset({abs_id(bound.term)}):
                return False
            if not check(bound):
                return False
        fv = free_vars(c.term)
        for key in labels_of(c.term):
            if key == c.term.label:
                continue
            if isinstance(key, str) and key in fv:
                continue
            if cache.get(key):
                return False
        return True

    return check(closure)
