"""Bounded-update analysis: overflow to UNKNOWN, concretization, and the
orderings against 0CFA."""

import random

import pytest

from lamflow.cache import UNKNOWN, cache_leq
from lamflow.cfa0 import analyze_0cfa
from lamflow.sub0cfa import analyze_sub0cfa, concretize
from lamflow.syntax import abstractions, parse

from generators import (
    LAM_F,
    LAM_X,
    LAM_Y,
    SELF_APPLY_SRC,
    closed_program,
    linear_program,
)


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        analyze_sub0cfa(parse(r"(\x.x)"), 0)


def test_linear_programs_never_overflow():
    rng = random.Random(61)
    for _ in range(50):
        program = linear_program(rng, 50)
        bounded = analyze_sub0cfa(program, 1)
        assert not bounded.has_unknown()
        assert concretize(bounded, program).entries == analyze_0cfa(program).entries


def test_example_program_overflows_at_bound_one():
    program = parse(SELF_APPLY_SRC)
    bounded = analyze_sub0cfa(program, 1)
    # x receives the two identities one after the other; the second
    # enlargement is beyond the bound.
    assert bounded.get("x") is UNKNOWN
    assert bounded.get(7) == frozenset({LAM_F})
    assert bounded.get(9) == frozenset({LAM_X})
    assert bounded.get(5) == frozenset({LAM_Y})


def test_concretize_identity_without_unknown():
    program = parse(r"((\x.x^1)^2 (\y.y^3)^4)^5")
    bounded = analyze_sub0cfa(program, 1)
    assert concretize(bounded, program).entries == dict(bounded.entries)


def test_concretize_expands_unknown_to_all_abstractions():
    program = parse(SELF_APPLY_SRC)
    cache = concretize(analyze_sub0cfa(program, 1), program)
    assert cache.get("x") == frozenset({LAM_F, LAM_X, LAM_Y})
    assert cache.get("x") == frozenset(abstractions(program))


def test_large_enough_bound_recovers_0cfa():
    program = parse(SELF_APPLY_SRC)
    zero = analyze_0cfa(program)
    for bound in (2, 3, 10):
        assert concretize(analyze_sub0cfa(program, bound), program).entries == zero.entries


def test_abstraction_count_bound_recovers_0cfa_generally():
    # Each point can strictly grow at most once per abstraction, so the
    # abstraction count always suffices as a bound.
    rng = random.Random(67)
    for _ in range(40):
        program = closed_program(rng, 40)
        bound = max(1, len(abstractions(program)))
        got = concretize(analyze_sub0cfa(program, bound), program)
        assert got.entries == analyze_0cfa(program).entries


def test_overapproximates_0cfa_for_all_bounds():
    rng = random.Random(71)
    programs = [parse(SELF_APPLY_SRC)]
    programs += [closed_program(rng, 40) for _ in range(25)]
    programs += [linear_program(rng, 40) for _ in range(25)]
    for program in programs:
        zero = analyze_0cfa(program)
        for bound in (1, 2, 4):
            widened = concretize(analyze_sub0cfa(program, bound), program)
            assert cache_leq(zero, widened)


def test_monotone_in_bound():
    rng = random.Random(73)
    programs = [parse(SELF_APPLY_SRC)] + [closed_program(rng, 40) for _ in range(30)]
    for program in programs:
        previous = None
        for bound in (1, 2, 4, 8):
            widened = concretize(analyze_sub0cfa(program, bound), program)
            if previous is not None:
                assert cache_leq(widened, previous)
            previous = widened


def test_update_counts_respect_bound():
    rng = random.Random(79)
    programs = [parse(SELF_APPLY_SRC)] + [closed_program(rng, 40) for _ in range(20)]
    for program in programs:
        for bound in (1, 2, 3):
            bounded = analyze_sub0cfa(program, bound)
            for key, value in bounded.entries.items():
                if value is not UNKNOWN:
                    assert bounded.update_counts[key] <= bound
