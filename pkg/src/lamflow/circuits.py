"""Boolean circuits and their compilation into closed linear terms.

Circuits are DAGs over NOT/AND/COPY gates with linear wiring: every wire
is produced exactly once and consumed exactly once (fan-out must go
through an explicit COPY).  Such a circuit together with its input bits
compiles to a closed linear term that evaluates the circuit, so running
any of the flow analyses on the compiled term answers the circuit value
problem.

The value encoding is the usual pair trick: ``TT`` is the identity on
pairs, ``FF`` the swap, and a boolean is a pair of the two, real value
first, complement second.  AND produces leftover symmetric garbage (one
FF and one TT in unknown order) which is disposed of by composing it with
one more swap, yielding the identity; nothing is discarded, so linearity
is preserved and no flow is lost.

The probe wrapped around the circuit output destructures the boolean,
applies the real component to a pair of two fresh marker identities, and
consumes everything linearly.  The first marker reaches the probe label
exactly when the circuit accepts, which is the flow the decision
procedure queries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .cfa0 import FlowQuery, analyze_0cfa, flow_query
from .evaluator import evaluate
from .sca import analyze_sca_naive, analyze_sca_unionfind
from .sub0cfa import analyze_sub0cfa, concretize
from .syntax import (
    Abs,
    AbsId,
    App,
    Ref,
    Term,
    abs_id,
    free_vars,
    is_linear,
    term_size,
)


class NetlistError(Exception):
    pass


@dataclass(frozen=True)
class NotGate:
    out: str
    src: str


@dataclass(frozen=True)
class AndGate:
    out: str
    left: str
    right: str


@dataclass(frozen=True)
class CopyGate:
    out1: str
    out2: str
    src: str


Gate = Union[NotGate, AndGate, CopyGate]


@dataclass(frozen=True)
class Circuit:
    inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    output: str


_WIRE_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _gate_sources(gate: Gate) -> tuple[str, ...]:
    if isinstance(gate, NotGate):
        return (gate.src,)
    if isinstance(gate, AndGate):
        return (gate.left, gate.right)
    return (gate.src,)


def _gate_outputs(gate: Gate) -> tuple[str, ...]:
    if isinstance(gate, CopyGate):
        return (gate.out1, gate.out2)
    return (gate.out,)


def parse_netlist(text: str) -> Circuit:
    """Parse and validate a netlist; rejects non-linear wiring and cycles."""
    inputs: list[str] = []
    gates: list[Gate] = []
    outputs: list[str] = []

    def wire(token: str, n: int) -> str:
        if not _WIRE_RE.match(token):
            raise NetlistError(f"line {n}: invalid wire name {token!r}")
        return token

    for n, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "input" and len(parts) == 2:
            inputs.append(wire(parts[1], n))
        elif kind == "output" and len(parts) == 2:
            outputs.append(wire(parts[1], n))
        elif kind == "not" and len(parts) == 4 and parts[2] == "=":
            gates.append(NotGate(wire(parts[1], n), wire(parts[3], n)))
        elif kind == "and" and len(parts) == 5 and parts[2] == "=":
            gates.append(AndGate(wire(parts[1], n), wire(parts[3], n), wire(parts[4], n)))
        elif kind == "copy" and len(parts) == 5 and parts[3] == "=":
            gates.append(CopyGate(wire(parts[1], n), wire(parts[2], n), wire(parts[4], n)))
        else:
            raise NetlistError(f"line {n}: cannot parse statement {line!r}")

    if len(outputs) != 1:
        raise NetlistError("netlist must declare exactly one output")
    if not inputs:
        raise NetlistError("netlist must declare at least one input")
    circuit = Circuit(tuple(inputs), tuple(gates), outputs[0])
    _validate(circuit)
    return circuit


def _validate(circuit: Circuit) -> None:
    produced: dict = {}
    consumed: dict = {}
    for w in circuit.inputs:
        produced[w] = produced.get(w, 0) + 1
    for gate in circuit.gates:
        for w in _gate_outputs(gate):
            produced[w] = produced.get(w, 0) + 1
        for w in _gate_sources(gate):
            consumed[w] = consumed.get(w, 0) + 1
    consumed[circuit.output] = consumed.get(circuit.output, 0) + 1

    for w in consumed:
        if w not in produced:
            raise NetlistError(f"unknown wire {w!r}")
    for w, k in produced.items():
        if k > 1:
            raise NetlistError(f"wire {w!r} produced more than once")
        uses = consumed.get(w, 0)
        if uses == 0:
            raise NetlistError(f"wire {w!r} is never consumed")
        if uses > 1:
            raise NetlistError(
                f"wire {w!r} consumed more than once; insert a copy gate"
            )
    _topo_gates(circuit)


def _topo_gates(circuit: Circuit) -> list[Gate]:
    available = set(circuit.inputs)
    pending = list(circuit.gates)
    order: list[Gate] = []
    while pending:
        progressed = False
        remaining = []
        for gate in pending:
            if all(w in available for w in _gate_sources(gate)):
                order.append(gate)
                available.update(_gate_outputs(gate))
                progressed = True
            else:
                remaining.append(gate)
        pending = remaining
        if pending and not progressed:
            raise NetlistError("cycle detected in netlist")
    return order


def eval_circuit(circuit: Circuit, bits: Sequence[bool]) -> bool:
    """Direct boolean evaluation of the circuit on the given inputs."""
    if len(bits) != len(circuit.inputs):
        raise ValueError(
            f"expected {len(circuit.inputs)} input bits, got {len(bits)}"
        )
    value = {w: bool(b) for w, b in zip(circuit.inputs, bits)}
    for gate in _topo_gates(circuit):
        if isinstance(gate, NotGate):
            value[gate.out] = not value[gate.src]
        elif isinstance(gate, AndGate):
            value[gate.out] = value[gate.left] and value[gate.right]
        else:
            value[gate.out1] = value[gate.src]
            value[gate.out2] = value[gate.src]
    return value[circuit.output]


# ---------------------------------------------------------------------------
# Term construction


class TermBuilder:
    """Builds labeled terms with globally fresh labels and binder names.

    All binders are suffixed with a counter, so terms built by one builder
    can be combined freely without name or label collisions.
    """

    def __init__(self):
        self._label = 0
        self._name = 0

    def fresh_label(self) -> int:
        self._label += 1
        return self._label

    def fresh(self, base: str = "v") -> str:
        self._name += 1
        return f"{base}_{self._name}"

    def ref(self, name: str) -> Ref:
        return Ref(self.fresh_label(), name)

    def lam(self, binder: str, body: Term) -> Abs:
        return Abs(self.fresh_label(), binder, body)

    def app(self, fn: Term, arg: Term) -> App:
        return App(self.fresh_label(), fn, arg)

    def pair(self, a: Term, b: Term) -> Term:
        z = self.fresh("z")
        return self.lam(z, self.app(self.app(self.ref(z), a), b))

    def let_pair(self, x: str, y: str, pair_term: Term, body: Term) -> Term:
        return self.app(pair_term, self.lam(x, self.lam(y, body)))

    def compose(self, f: Term, g: Term) -> Term:
        w = self.fresh("w")
        return self.lam(w, self.app(f, self.app(g, self.ref(w))))

    def pair_identity(self) -> Term:
        p, x, y = self.fresh("p"), self.fresh("x"), self.fresh("y")
        return self.lam(
            p, self.let_pair(x, y, self.ref(p), self.pair(self.ref(x), self.ref(y)))
        )

    def pair_swap(self) -> Term:
        p, x, y = self.fresh("p"), self.fresh("x"), self.fresh("y")
        return self.lam(
            p, self.let_pair(x, y, self.ref(p), self.pair(self.ref(y), self.ref(x)))
        )

    def boolean_true(self) -> Term:
        return self.pair(self.pair_identity(), self.pair_swap())

    def boolean_false(self) -> Term:
        return self.pair(self.pair_swap(), self.pair_identity())

    def gate_not(self) -> Term:
        b, u, v = self.fresh("b"), self.fresh("u"), self.fresh("v")
        return self.lam(
            b, self.let_pair(u, v, self.ref(b), self.pair(self.ref(v), self.ref(u)))
        )

    def gate_copy(self) -> Term:
        b, u, v = self.fresh("b"), self.fresh("u"), self.fresh("v")
        return self.lam(
            b,
            self.let_pair(
                u,
                v,
                self.ref(b),
                self.pair(
                    self.app(self.ref(u), self.boolean_true()),
                    self.app(self.ref(v), self.boolean_false()),
                ),
            ),
        )

    def gate_and(self) -> Term:
        b1, b2 = self.fresh("b"), self.fresh("b")
        u1, v1 = self.fresh("u"), self.fresh("v")
        u2, v2 = self.fresh("u"), self.fresh("v")
        p1, p2 = self.fresh("p"), self.fresh("p")
        q1, q2 = self.fresh("q"), self.fresh("q")
        # The real output is p1; the leftovers p2 and q2 are one identity
        # and one swap in unknown order, so swap . p2 . q2 is the identity
        # and the second component collapses to q1, the complement.
        tail = self.compose(
            self.ref(q1),
            self.compose(self.ref(p2), self.compose(self.ref(q2), self.pair_swap())),
        )
        step4 = self.let_pair(
            q1,
            q2,
            self.app(self.ref(v1), self.pair(self.pair_identity(), self.ref(v2))),
            self.pair(self.ref(p1), tail),
        )
        step3 = self.let_pair(
            p1,
            p2,
            self.app(self.ref(u1), self.pair(self.ref(u2), self.pair_swap())),
            step4,
        )
        step2 = self.let_pair(u2, v2, self.ref(b2), step3)
        step1 = self.let_pair(u1, v1, self.ref(b1), step2)
        return self.lam(b1, self.lam(b2, step1))


def encode_gates() -> dict[str, Term]:
    """The seven building blocks as standalone closed linear terms."""

    def build(make):
        return make(TermBuilder())

    return {
        "TT": build(TermBuilder.pair_identity),
        "FF": build(TermBuilder.pair_swap),
        "True": build(TermBuilder.boolean_true),
        "False": build(TermBuilder.boolean_false),
        "Not": build(TermBuilder.gate_not),
        "Copy": build(TermBuilder.gate_copy),
        "And": build(TermBuilder.gate_and),
    }


# ---------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class BooleanProbe:
    term: Term
    true_marker: AbsId
    probe_label: int


def attach_probe(builder: TermBuilder, boolean: Term) -> BooleanProbe:
    """Wrap a boolean-valued term so a marker flow reveals its value.

    Destructures the boolean into real part ``u`` and complement ``v``,
    applies ``u`` to a pair of fresh marker identities, and consumes the
    resulting pair and ``v`` with one final application.  The first marker
    flows to the recorded label iff the boolean is true.
    """
    u, v = builder.fresh("u"), builder.fresh("v")
    r, s = builder.fresh("r"), builder.fresh("s")
    a1, a2 = builder.fresh("m"), builder.fresh("m")
    marker_true = builder.lam(a1, builder.ref(a1))
    marker_false = builder.lam(a2, builder.ref(a2))
    r_ref = builder.ref(r)
    term = builder.let_pair(
        u,
        v,
        boolean,
        builder.let_pair(
            r,
            s,
            builder.app(builder.ref(u), builder.pair(marker_true, marker_false)),
            builder.app(builder.ref(v), builder.pair(r_ref, builder.ref(s))),
        ),
    )
    return BooleanProbe(term, abs_id(marker_true), r_ref.label)


@dataclass(frozen=True)
class ComplementProbe:
    term: Term
    value_marker: AbsId
    value_label: int
    value_binder: str
    complement_marker: AbsId
    complement_label: int
    complement_binder: str


def attach_complement_probe(builder: TermBuilder, boolean: Term) -> ComplementProbe:
    """Probe both components of a boolean with independent markers.

    The first marker reaches its label iff the boolean is true; the second
    marker reaches its label iff the boolean is false, which is how the
    self-annihilating garbage of AND is checked to behave as a genuine
    complement.
    """
    u, v = builder.fresh("u"), builder.fresh("v")
    r1, s1 = builder.fresh("r"), builder.fresh("s")
    r2, s2 = builder.fresh("r"), builder.fresh("s")
    a1, b1 = builder.fresh("a"), builder.fresh("b")
    a2, b2 = builder.fresh("a"), builder.fresh("b")
    names = [builder.fresh("m") for _ in range(4)]
    mt1 = builder.lam(names[0], builder.ref(names[0]))
    mf1 = builder.lam(names[1], builder.ref(names[1]))
    mt2 = builder.lam(names[2], builder.ref(names[2]))
    mf2 = builder.lam(names[3], builder.ref(names[3]))
    r1_ref = builder.ref(r1)
    r2_ref = builder.ref(r2)
    # Each marker pair goes through a fresh pair identity before being
    # rebuilt into the result: that keeps the wiring linear while forcing
    # the pair apart, so the marker flows land on the recorded occurrence
    # labels instead of staying inside an unapplied value.
    body = builder.let_pair(
        a1,
        b1,
        builder.app(builder.pair_identity(), builder.pair(r1_ref, builder.ref(s1))),
        builder.let_pair(
            a2,
            b2,
            builder.app(
                builder.pair_identity(), builder.pair(r2_ref, builder.ref(s2))
            ),
            builder.pair(
                builder.pair(builder.ref(a1), builder.ref(b1)),
                builder.pair(builder.ref(a2), builder.ref(b2)),
            ),
        ),
    )
    term = builder.let_pair(
        u,
        v,
        boolean,
        builder.let_pair(
            r1,
            s1,
            builder.app(builder.ref(u), builder.pair(mt1, mf1)),
            builder.let_pair(
                r2,
                s2,
                builder.app(builder.ref(v), builder.pair(mt2, mf2)),
                body,
            ),
        ),
    )
    return ComplementProbe(
        term, abs_id(mt1), r1_ref.label, a1, abs_id(mt2), r2_ref.label, a2
    )


# ---------------------------------------------------------------------------
# Compilation and the decision procedure


@dataclass(frozen=True)
class CompiledInstance:
    term: Term
    true_marker: AbsId
    probe_label: int


def compile_circuit(circuit: Circuit, bits: Sequence[bool]) -> CompiledInstance:
    """Compile a circuit and its inputs into a closed linear term.

    Single-output gates are inlined at their unique consumption site; COPY
    gates bind their two outputs with a pair destructuring.  The output
    wire is fed to the probe.
    """
    if len(bits) != len(circuit.inputs):
        raise ValueError(
            f"expected {len(circuit.inputs)} input bits, got {len(bits)}"
        )
    builder = TermBuilder()
    order = _topo_gates(circuit)
    wires = {
        w: (builder.boolean_true() if bool(b) else builder.boolean_false())
        for w, b in zip(circuit.inputs, bits)
    }
    probe_info: list[BooleanProbe] = []

    def build(i: int) -> Term:
        if i == len(order):
            out = wires.pop(circuit.output)
            assert not wires, "all wires must be consumed"
            probe = attach_probe(builder, out)
            probe_info.append(probe)
            return probe.term
        gate = order[i]
        if isinstance(gate, NotGate):
            wires[gate.out] = builder.app(builder.gate_not(), wires.pop(gate.src))
            return build(i + 1)
        if isinstance(gate, AndGate):
            applied = builder.app(
                builder.app(builder.gate_and(), wires.pop(gate.left)),
                wires.pop(gate.right),
            )
            wires[gate.out] = applied
            return build(i + 1)
        copied = builder.app(builder.gate_copy(), wires.pop(gate.src))
        n1, n2 = builder.fresh(gate.out1), builder.fresh(gate.out2)
        wires[gate.out1] = builder.ref(n1)
        wires[gate.out2] = builder.ref(n2)
        return builder.let_pair(n1, n2, copied, build(i + 1))

    term = build(0)
    probe = probe_info[0]
    assert not free_vars(term), "compiled term must be closed"
    assert is_linear(term), "compiled term must be linear"
    evaluate(term, {}, fuel=term_size(term))
    return CompiledInstance(term, probe.true_marker, probe.probe_label)


_ANALYSES = ("0cfa", "sca", "sca-uf", "sca-naive", "sub0cfa")


def cvp_decide(
    circuit: Circuit,
    bits: Sequence[bool],
    analysis: str = "0cfa",
    bound: int = 1,
) -> bool:
    """Decide circuit acceptance by flow analysis of the compiled term."""
    instance = compile_circuit(circuit, bits)
    if analysis == "0cfa":
        cache = analyze_0cfa(instance.term)
    elif analysis in ("sca", "sca-uf"):
        cache = analyze_sca_unionfind(instance.term)
    elif analysis == "sca-naive":
        cache = analyze_sca_naive(instance.term)
    elif analysis == "sub0cfa":
        cache = concretize(analyze_sub0cfa(instance.term, bound), instance.term)
    else:
        raise ValueError(f"unknown analysis {analysis!r}; expected one of {_ANALYSES}")
    query = FlowQuery(instance.term, instance.true_marker, instance.probe_label)
    return flow_query(cache, query)
