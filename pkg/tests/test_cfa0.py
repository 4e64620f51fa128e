"""0CFA: golden tables, acceptability, ordering, and leastness."""

import random

import pytest

from lamflow.cache import Cache, cache_leq
from lamflow.cfa0 import FlowQuery, accepts_0cfa, analyze_0cfa, flow_query
from lamflow.evaluator import FuelExhaustedError, evaluate
from lamflow.sca import analyze_sca_unionfind
from lamflow.syntax import AbsId, abstractions, labels_of, parse

from generators import (
    LAM_X,
    LAM_Y,
    SCA_EXPECTED,
    SELF_APPLY_SRC,
    ZEROCFA_EXPECTED,
    as_entries,
    closed_program,
    enumerate_closed_programs,
    linear_program,
    strict_subcaches,
)


def test_golden_example_table():
    cache = analyze_0cfa(parse(SELF_APPLY_SRC))
    assert dict(cache.entries) == as_entries(ZEROCFA_EXPECTED)


def test_no_application_program():
    cache = analyze_0cfa(parse(r"(\x.x^2)^1"))
    assert dict(cache.entries) == {
        1: frozenset({AbsId("x", 1)}),
        2: frozenset(),
        "x": frozenset(),
    }


def test_identity_application_flows():
    cache = analyze_0cfa(parse(r"((\x.x^1)^2 (\y.y^3)^4)^5"))
    lam_x, lam_y = AbsId("x", 2), AbsId("y", 4)
    assert dict(cache.entries) == {
        1: frozenset({lam_y}),
        2: frozenset({lam_x}),
        3: frozenset(),
        4: frozenset({lam_y}),
        5: frozenset({lam_y}),
        "x": frozenset({lam_y}),
        "y": frozenset(),
    }


def test_omega_terminates():
    cache = analyze_0cfa(parse(r"((\x.(x^1 x^2)^3)^4 (\y.(y^5 y^6)^7)^8)^9"))
    assert cache.get(4) == frozenset({AbsId("x", 4)})
    assert cache.get("x") == frozenset({AbsId("y", 8)})


class TestAccepts:
    def test_analysis_is_acceptable(self):
        rng = random.Random(17)
        programs = [parse(SELF_APPLY_SRC)]
        programs += [linear_program(rng, 40) for _ in range(30)]
        programs += [closed_program(rng, 40) for _ in range(30)]
        for program in programs:
            assert accepts_0cfa(analyze_0cfa(program), program)

    def test_empty_cache_rejected(self):
        program = parse(r"(\x.x^2)^1")
        assert not accepts_0cfa(Cache({}), program)

    def test_top_cache_accepted(self):
        program = parse(SELF_APPLY_SRC)
        everything = frozenset(abstractions(program))
        top = Cache({k: everything for k in labels_of(program)})
        assert accepts_0cfa(top, program)

    def test_supersets_are_not_always_acceptable(self):
        # Adding a flow into an operator position creates obligations the
        # rest of the cache need not meet, so acceptability is not upward
        # closed; only consistently saturated supersets pass.
        program = parse(r"((\x.x^1)^2 (\y.y^3)^4)^5")
        least = analyze_0cfa(program)
        entries = dict(least.entries)
        entries[2] = entries[2] | {AbsId("y", 4)}
        assert not accepts_0cfa(Cache(entries), program)


def test_cache_leq():
    zero = Cache(as_entries(ZEROCFA_EXPECTED))
    eq = Cache(as_entries(SCA_EXPECTED))
    assert cache_leq(zero, zero)
    assert cache_leq(zero, eq)
    assert not cache_leq(eq, zero)


def test_approximation_order_on_random_programs():
    rng = random.Random(23)
    for _ in range(40):
        program = closed_program(rng, 40)
        assert cache_leq(analyze_0cfa(program), analyze_sca_unionfind(program))


class TestFlowQuery:
    def test_golden_queries(self):
        program = parse(SELF_APPLY_SRC)
        cache = analyze_0cfa(program)
        assert flow_query(cache, FlowQuery(program, LAM_Y, 4))
        assert not flow_query(cache, FlowQuery(program, LAM_Y, 9))
        assert flow_query(cache, FlowQuery(program, LAM_X, 9))

    def test_rejects_foreign_target(self):
        program = parse(SELF_APPLY_SRC)
        with pytest.raises(ValueError):
            FlowQuery(program, AbsId("q", 99), 4)

    def test_rejects_foreign_label(self):
        program = parse(SELF_APPLY_SRC)
        with pytest.raises(ValueError):
            FlowQuery(program, LAM_Y, 99)


def test_passes_grow_monotonically():
    snapshots = []
    analyze_0cfa(parse(SELF_APPLY_SRC), on_pass=snapshots.append)
    assert len(snapshots) >= 2
    for earlier, later in zip(snapshots, snapshots[1:]):
        assert cache_leq(earlier, later)
    assert snapshots[-2].entries == snapshots[-1].entries


def test_sound_for_terminating_evaluation():
    rng = random.Random(31)
    checked = 0
    for _ in range(120):
        program = closed_program(rng, 30)
        try:
            result = evaluate(program, {}, fuel=200)
        except FuelExhaustedError:
            continue
        cache = analyze_0cfa(program)
        assert AbsId(result.term.binder, result.term.label) in cache.get(program.label)
        checked += 1
    assert checked >= 40


def test_least_among_subcaches_on_small_programs():
    count = 0
    for program in enumerate_closed_programs(6):
        cache = analyze_0cfa(program)
        assert accepts_0cfa(cache, program)
        for candidate in strict_subcaches(cache):
            assert not accepts_0cfa(candidate, program)
        count += 1
    assert count >= 10
