"""Command-line front end.

Exit codes partition failure modes so harnesses can assert precisely:
0 success, 1 bad input (parse/netlist/unbound variable/IO), 2 bad flags,
3 fuel exhausted, 4 linearity or closedness violation, 5 internal
invariant breach (analysis disagreeing with direct circuit evaluation).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .cfa0 import analyze_0cfa
from .circuits import (
    NetlistError,
    compile_circuit,
    cvp_decide,
    eval_circuit,
    parse_netlist,
)
from .evaluator import (
    Closure,
    FuelExhaustedError,
    UnboundVariableError,
    evaluate,
)
from .sca import analyze_sca_naive, analyze_sca_unionfind
from .sub0cfa import analyze_sub0cfa
from .syntax import (
    ParseError,
    binder_occurrences,
    free_vars,
    parse,
    pretty,
    term_shorthand,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_FUEL = 3
EXIT_NONLINEAR = 4
EXIT_INTERNAL = 5

_ANALYSIS_CHOICES = ["0cfa", "sca-naive", "sca-uf", "sub0cfa"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamflow",
        description="Flow analyses and circuit compilation for the labeled lambda calculus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run a flow analysis and print the cache")
    analyze.add_argument("file")
    analyze.add_argument("--analysis", choices=_ANALYSIS_CHOICES, default="0cfa")
    analyze.add_argument("--bound", type=int, default=None, metavar="N")
    analyze.add_argument("--format", choices=["table", "json"], default="table")
    analyze.add_argument("--alpha-rename", action="store_true")

    ev = sub.add_parser("eval", help="evaluate a closed program")
    ev.add_argument("file")
    ev.add_argument("--fuel", type=int, default=None, metavar="N")
    ev.add_argument("--alpha-rename", action="store_true")

    lin = sub.add_parser("check-linear", help="check closedness and linearity")
    lin.add_argument("file")
    lin.add_argument("--alpha-rename", action="store_true")

    circuit = sub.add_parser("circuit", help="compile, evaluate, or decide a netlist")
    circuit_sub = circuit.add_subparsers(dest="action", required=True)
    for action in ("compile", "eval", "decide"):
        c = circuit_sub.add_parser(action)
        c.add_argument("file")
        c.add_argument("--inputs", required=True, metavar="BITS")
        if action == "decide":
            c.add_argument("--analysis", choices=_ANALYSIS_CHOICES, default="0cfa")
            c.add_argument("--bound", type=int, default=None, metavar="N")
        if action == "compile":
            c.add_argument("-o", "--output", default=None, metavar="FILE")

    return parser


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _check_bound(args) -> Optional[int]:
    bound = getattr(args, "bound", None)
    analysis = getattr(args, "analysis", None)
    if bound is not None and analysis != "sub0cfa":
        print("error: --bound is only meaningful with --analysis sub0cfa", file=sys.stderr)
        return EXIT_USAGE
    if bound is not None and bound < 1:
        print("error: --bound must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    return None


def _run_analysis(term, analysis: str, bound: Optional[int]):
    if analysis == "0cfa":
        return analyze_0cfa(term)
    if analysis == "sca-naive":
        return analyze_sca_naive(term)
    if analysis == "sca-uf":
        return analyze_sca_unionfind(term)
    return analyze_sub0cfa(term, 1 if bound is None else bound)


def _cmd_analyze(args) -> int:
    usage = _check_bound(args)
    if usage is not None:
        return usage
    term = parse(_read(args.file), alpha_rename=args.alpha_rename)
    result = _run_analysis(term, args.analysis, args.bound)
    print(result.to_json() if args.format == "json" else result.to_table())
    return EXIT_OK


def _format_env(env) -> str:
    if not env:
        return "{}"
    parts = [f"{name} -> {_format_closure(env[name])}" for name in sorted(env)]
    return "{" + ", ".join(parts) + "}"


def _format_closure(closure: Closure) -> str:
    return f"<{term_shorthand(closure.term)}, {_format_env(closure.env)}>"


def _cmd_eval(args) -> int:
    term = parse(_read(args.file), alpha_rename=args.alpha_rename)
    result = evaluate(term, {}, fuel=args.fuel)
    print(term_shorthand(result.term))
    print(f"env: {_format_env(result.env)}")
    return EXIT_OK


def _cmd_check_linear(args) -> int:
    term = parse(_read(args.file), alpha_rename=args.alpha_rename)
    problems = []
    for binder, count in sorted(binder_occurrences(term).items()):
        if count != 1:
            problems.append(f"binder {binder!r} occurs {count} times (must be exactly 1)")
    for name in sorted(free_vars(term)):
        problems.append(f"free variable {name!r}")
    if problems:
        for line in problems:
            print(line)
        return EXIT_NONLINEAR
    print("linear and closed")
    return EXIT_OK


def _parse_bits(text: str, expected: int) -> list[bool]:
    if not text or any(c not in "01" for c in text):
        raise NetlistError(f"--inputs must be a bitstring, got {text!r}")
    if len(text) != expected:
        raise NetlistError(
            f"--inputs has {len(text)} bits but the circuit has {expected} inputs"
        )
    return [c == "1" for c in text]


def _cmd_circuit(args) -> int:
    usage = _check_bound(args)
    if usage is not None:
        return usage
    circuit = parse_netlist(_read(args.file))
    bits = _parse_bits(args.inputs, len(circuit.inputs))
    if args.action == "eval":
        print("true" if eval_circuit(circuit, bits) else "false")
        return EXIT_OK
    if args.action == "compile":
        instance = compile_circuit(circuit, bits)
        text = pretty(instance.term) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        print(f"true_marker = {instance.true_marker}")
        print(f"probe_label = {instance.probe_label}")
        return EXIT_OK
    expected = eval_circuit(circuit, bits)
    bound = 1 if args.bound is None else args.bound
    answer = cvp_decide(circuit, bits, analysis=args.analysis, bound=bound)
    if answer != expected:
        print(
            "internal error: flow analysis disagrees with direct circuit evaluation",
            file=sys.stderr,
        )
        return EXIT_INTERNAL
    print("ACCEPT" if answer else "REJECT")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    if sys.getrecursionlimit() < 10000:
        sys.setrecursionlimit(10000)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "check-linear":
            return _cmd_check_linear(args)
        return _cmd_circuit(args)
    except FuelExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FUEL
    except (ParseError, NetlistError, UnboundVariableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
