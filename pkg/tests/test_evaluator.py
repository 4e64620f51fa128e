"""Evaluator, closure sizes, and the cache-respects oracle."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from lamflow.cache import Cache
from lamflow.evaluator import (
    Closure,
    FuelExhaustedError,
    UnboundVariableError,
    closure_size,
    config_size,
    evaluate,
    linearly_closes,
    respects,
)
from lamflow.syntax import Abs, App, Ref, abs_id, parse

from generators import SELF_APPLY_SRC, linear_closure_config, linear_program

OMEGA_SRC = r"((\x.(x^1 x^2)^3)^4 (\y.(y^5 y^6)^7)^8)^9"


class TestEvaluate:
    def test_identity_application(self):
        term = parse(r"((\x.x^1)^2 (\y.y^3)^4)^5")
        result = evaluate(term)
        assert result == Closure(Abs(4, "y", Ref(3, "y")), {})

    def test_example_program(self):
        result = evaluate(parse(SELF_APPLY_SRC))
        assert result.term == Abs(5, "y", Ref(4, "y"))
        assert result.env == {}

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError):
            evaluate(parse("x^1"))

    def test_omega_exhausts_fuel(self):
        with pytest.raises(FuelExhaustedError):
            evaluate(parse(OMEGA_SRC), fuel=50)

    def test_unused_binder_is_dropped(self):
        # A discarding program still evaluates; tightening removes the
        # unused binding before the variable lookup.
        term = parse(r"(((\x.(\k.x^1)^2)^3 (\a.a^4)^5)^6 (\b.b^7)^8)^9")
        result = evaluate(term)
        assert result.term.binder == "a"

    def test_open_result_keeps_environment(self):
        term = parse(r"((\x.(\z.x^1)^2)^3 (\y.y^4)^5)^6")
        result = evaluate(term)
        assert result.term.binder == "z"
        assert set(result.env) == {"x"}
        assert result.env["x"].term == Abs(5, "y", Ref(4, "y"))

    def test_operator_evaluated_before_operand(self):
        # Operator divergence must win over an unbound operand error.
        omega = parse(OMEGA_SRC)
        bad = App(100, omega, Ref(99, "zz"))
        with pytest.raises(FuelExhaustedError):
            evaluate(bad, {"zz": Closure(parse(r"(\q.q^95)^96"), {})}, fuel=20)


class TestSizes:
    def test_size_of_closed_identity(self):
        assert closure_size(Closure(parse(r"(\y.y)"), {})) == 2

    def test_size_with_environment(self):
        inner = Closure(parse(r"(\y.y^1)^2"), {})
        outer = Closure(
            Abs(3, "x", App(4, Ref(5, "x"), Ref(6, "z"))), {"z": inner}
        )
        assert closure_size(outer) == 7

    def test_linear_evaluation_shrinks(self):
        rng = random.Random(11)
        for _ in range(300):
            term, env = linear_closure_config(rng)
            before = config_size(term, env)
            result = evaluate(term, env, fuel=before)
            assert closure_size(result) <= before

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**9))
    def test_linear_evaluation_shrinks_property(self, seed):
        term, env = linear_closure_config(random.Random(seed))
        before = config_size(term, env)
        result = evaluate(term, env, fuel=before)
        assert closure_size(result) <= before


class TestLinearClosure:
    def test_generated_configs_are_linear(self):
        rng = random.Random(3)
        for _ in range(100):
            term, env = linear_closure_config(rng)
            assert linearly_closes(term, env)

    def test_nonlinear_term_rejected(self):
        assert not linearly_closes(parse(SELF_APPLY_SRC), {})

    def test_env_domain_must_match_free_vars(self):
        term = parse(r"(\x.(x y))")
        assert not linearly_closes(term, {})
        filler = Closure(parse(r"(\q.q^90)^91"), {})
        assert linearly_closes(term, {"y": filler})
        assert not linearly_closes(term, {"y": filler, "w": filler})


class TestRespects:
    def test_closed_linear_term_with_empty_cache(self):
        term = parse(r"(\x.x^2)^1")
        cache = Cache({1: frozenset(), 2: frozenset(), "x": frozenset()})
        assert respects(cache, Closure(term, {}))

    def test_binding_must_be_singleton(self):
        value = Closure(parse(r"(\y.y^1)^2"), {})
        other = parse(r"(\z.z^3)^4")
        closure = Closure(Abs(5, "w", App(6, Ref(7, "w"), Ref(8, "x"))), {"x": value})
        good = Cache({"x": frozenset({abs_id(value.term)})})
        bad = Cache({"x": frozenset({abs_id(value.term), abs_id(other)})})
        assert respects(good, closure)
        assert not respects(bad, closure)

    def test_inner_labels_must_be_empty(self):
        term = parse(r"(\x.x^2)^1")
        poisoned = Cache({2: frozenset({abs_id(term)})})
        assert not respects(poisoned, Closure(term, {}))

    def test_own_label_is_not_constrained(self):
        term = parse(r"(\x.x^2)^1")
        cache = Cache({1: frozenset({abs_id(term)})})
        assert respects(cache, Closure(term, {}))
