"""Labeled lambda calculus: AST, parser, printer, and structural predicates.

Every subterm carries an integer label, unique within its program.  Labels
and variable names together form the key space of the flow analyses, so a
program's "points" are exactly ``labels_of(term)``.

Concrete syntax::

    expr ::= term | term '^' nat
    term ::= var | '\\' var '.' expr | '(' expr expr ')' | '(' expr ')'
    var  ::= [a-zA-Z_][a-zA-Z0-9_]*

``--`` starts a comment running to end of line.  Application always takes
parentheses.  A label suffix on a parenthesized expression labels the node
inside, so ``(\\x.x^2)^1`` is the abstraction labeled 1 with body labeled 2.
Subterms without an explicit label are assigned fresh ones in a
left-to-right, depth-first (node before children) sweep, counting up from
the largest explicit label.

Programs must use pairwise distinct binder names, distinct from any free
variable name.  ``parse(..., alpha_rename=True)`` renames binders instead
of rejecting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Ref:
    """Occurrence of a variable."""

    label: int
    name: str


@dataclass(frozen=True)
class Abs:
    """Abstraction ``\\binder.body``."""

    label: int
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    """Application ``(fn arg)``."""

    label: int
    fn: "Term"
    arg: "Term"


Term = Union[Ref, Abs, App]

LabelOrVar = Union[int, str]


@dataclass(frozen=True, order=True)
class AbsId:
    """Identity of an abstraction as a flow value.

    Two syntactically equal abstractions at different positions are
    different values; the node label is what tells them apart.  The binder
    name is carried along for display only.
    """

    binder: str
    label: int

    def __str__(self) -> str:
        return f"λ{self.binder}@{self.label}"


def abs_id(node: Abs) -> AbsId:
    return AbsId(node.binder, node.label)


class ParseError(Exception):
    """Syntax or well-formedness error, with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Tokenizer


_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'lam' 'dot' 'lparen' 'rparen' 'caret' 'nat' 'ident' 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "-" and i + 1 < n and text[i + 1] == "-":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == "\\":
            tokens.append(_Token("lam", c, start_line, start_col))
            i += 1
            col += 1
        elif c == ".":
            tokens.append(_Token("dot", c, start_line, start_col))
            i += 1
            col += 1
        elif c == "(":
            tokens.append(_Token("lparen", c, start_line, start_col))
            i += 1
            col += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, start_line, start_col))
            i += 1
            col += 1
        elif c == "^":
            tokens.append(_Token("caret", c, start_line, start_col))
            i += 1
            col += 1
        elif c in _DIGITS:
            j = i
            while j < n and text[j] in _DIGITS:
                j += 1
            tokens.append(_Token("nat", text[i:j], start_line, start_col))
            col += j - i
            i = j
        elif c in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            tokens.append(_Token("ident", text[i:j], start_line, start_col))
            col += j - i
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser

# Raw nodes are mutable so the labeling sweep can fill in missing labels
# before the tree is frozen.


@dataclass
class _RawRef:
    label: int | None
    name: str
    line: int
    col: int


@dataclass
class _RawAbs:
    label: int | None
    binder: str
    body: "_Raw"
    line: int
    col: int


@dataclass
class _RawApp:
    label: int | None
    fn: "_Raw"
    arg: "_Raw"
    line: int
    col: int


_Raw = Union[_RawRef, _RawAbs, _RawApp]


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.labels_seen: dict[int, _Token] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            found = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {what}, found {found}", tok.line, tok.col)
        return self.advance()

    def parse_expr(self) -> _Raw:
        node = self.parse_term()
        if self.peek().kind == "caret":
            caret = self.advance()
            nat = self.expect("nat", "a label")
            value = int(nat.text)
            if value <= 0:
                raise ParseError("labels must be positive", nat.line, nat.col)
            if node.label is not None:
                raise ParseError(
                    "expression already carries a label", caret.line, caret.col
                )
            if value in self.labels_seen:
                raise ParseError(f"duplicate label {value}", nat.line, nat.col)
            self.labels_seen[value] = nat
            node.label = value
        return node

    def parse_term(self) -> _Raw:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return _RawRef(None, tok.text, tok.line, tok.col)
        if tok.kind == "lam":
            self.advance()
            binder = self.expect("ident", "a binder name")
            self.expect("dot", "'.'")
            body = self.parse_expr()
            return _RawAbs(None, binder.text, body, binder.line, binder.col)
        if tok.kind == "lparen":
            self.advance()
            first = self.parse_expr()
            if self.peek().kind == "rparen":
                self.advance()
                return first
            second = self.parse_expr()
            self.expect("rparen", "')'")
            return _RawApp(None, first, second, tok.line, tok.col)
        found = repr(tok.text) if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected a term, found {found}", tok.line, tok.col)


def _assign_labels(root: _Raw) -> None:
    """Fill missing labels, depth-first, node before children."""
    explicit = [node.label for node in _raw_preorder(root) if node.label is not None]
    counter = max(explicit, default=0)
    for node in _raw_preorder(root):
        if node.label is None:
            counter += 1
            node.label = counter


def _raw_preorder(root: _Raw) -> Iterator[_Raw]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, _RawAbs):
            stack.append(node.body)
        elif isinstance(node, _RawApp):
            stack.append(node.arg)
            stack.append(node.fn)


def _freeze(node: _Raw) -> Term:
    if isinstance(node, _RawRef):
        return Ref(node.label, node.name)
    if isinstance(node, _RawAbs):
        return Abs(node.label, node.binder, _freeze(node.body))
    return App(node.label, _freeze(node.fn), _freeze(node.arg))


def _check_binders(root: _Raw, term: Term) -> None:
    binders: dict[str, _RawAbs] = {}
    for node in _raw_preorder(root):
        if isinstance(node, _RawAbs):
            if node.binder in binders:
                raise ParseError(
                    f"duplicate binder name {node.binder!r}", node.line, node.col
                )
            binders[node.binder] = node
    for name in free_vars(term):
        if name in binders:
            node = binders[name]
            raise ParseError(
                f"binder {name!r} collides with a free variable of the same name",
                node.line,
                node.col,
            )


def parse(text: str, *, alpha_rename: bool = False) -> Term:
    """Parse a program, assigning fresh labels where missing.

    With ``alpha_rename=True``, repeated binder names are renamed apart
    instead of rejected.
    """
    parser = _Parser(_tokenize(text))
    raw = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    _assign_labels(raw)
    term = _freeze(raw)
    if alpha_rename:
        return _alpha_rename(term)
    _check_binders(raw, term)
    return term


# ---------------------------------------------------------------------------
# Printing


def pretty(term: Term, with_labels: bool = True) -> str:
    """Render a term; the labeled form parses back to the same tree."""
    out: list[str] = []
    stack: list[Union[Term, str]] = [term]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        suffix = f"^{item.label}" if with_labels else ""
        if isinstance(item, Ref):
            out.append(item.name + suffix)
        elif isinstance(item, Abs):
            out.append(f"(\\{item.binder}.")
            stack.append(")" + suffix)
            stack.append(item.body)
        else:
            out.append("(")
            stack.append(")" + suffix)
            stack.append(item.arg)
            stack.append(" ")
            stack.append(item.fn)
    return "".join(out)


def term_shorthand(term: Term) -> str:
    """Closure-value rendering: an abstraction without its own outer label."""
    if isinstance(term, Abs):
        return f"\\{term.binder}.{pretty(term.body)}"
    return pretty(term)


# ---------------------------------------------------------------------------
# Structural predicates


def _postorder(term: Term) -> Iterator[Term]:
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        stack.append((node, True))
        if isinstance(node, Abs):
            stack.append((node.body, False))
        elif isinstance(node, App):
            stack.append((node.arg, False))
            stack.append((node.fn, False))


def preorder(term: Term) -> Iterator[Term]:
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Abs):
            stack.append(node.body)
        elif isinstance(node, App):
            stack.append(node.arg)
            stack.append(node.fn)


def _free_counts(term: Term) -> dict[int, dict[str, int]]:
    """Free-occurrence counts per node, keyed by node label.

    Children's entries are kept, so callers can look up any subterm.
    """
    counts: dict[int, dict[str, int]] = {}
    for node in _postorder(term):
        if isinstance(node, Ref):
            counts[node.label] = {node.name: 1}
        elif isinstance(node, Abs):
            inner = dict(counts[node.body.label])
            inner.pop(node.binder, None)
            counts[node.label] = inner
        else:
            merged = dict(counts[node.fn.label])
            for name, k in counts[node.arg.label].items():
                merged[name] = merged.get(name, 0) + k
            counts[node.label] = merged
    return counts


def free_vars(term: Term) -> frozenset[str]:
    """The free variables of ``term``."""
    return frozenset(_free_counts(term)[term.label])


def labels_of(term: Term) -> frozenset[LabelOrVar]:
    """All labels plus all variable names occurring in ``term``.

    This is the key space a flow cache for the program is defined over.
    """
    keys: set[LabelOrVar] = set()
    for node in preorder(term):
        keys.add(node.label)
        if isinstance(node, Ref):
            keys.add(node.name)
        elif isinstance(node, Abs):
            keys.add(node.binder)
    return frozenset(keys)


def binder_occurrences(term: Term) -> dict[str, int]:
    """For each binder, how many times it occurs free in its body."""
    counts = _free_counts(term)
    report = {}
    for node in preorder(term):
        if isinstance(node, Abs):
            report[node.binder] = counts[node.body.label].get(node.binder, 0)
    return report


def is_linear(term: Term) -> bool:
    """True iff every bound variable occurs exactly once in its body."""
    return all(k == 1 for k in binder_occurrences(term).values())


def term_size(term: Term) -> int:
    """Node count: 1 for a variable, 1 + size of each child otherwise."""
    size = 0
    for _ in preorder(term):
        size += 1
    return size


def label_index(term: Term) -> dict[int, Term]:
    """Map each label to its node."""
    return {node.label: node for node in preorder(term)}


def abstractions(term: Term) -> tuple[AbsId, ...]:
    """All abstraction identities, in program (depth-first) order."""
    return tuple(abs_id(n) for n in preorder(term) if isinstance(n, Abs))


def relabel(term: Term, start: int = 1) -> Term:
    """Reassign labels in the depth-first order used by the parser."""
    counter = start - 1

    def go(node: Term) -> Term:
        nonlocal counter
        counter += 1
        label = counter
        if isinstance(node, Ref):
            return Ref(label, node.name)
        if isinstance(node, Abs):
            return Abs(label, node.binder, go(node.body))
        return App(label, go(node.fn), go(node.arg))

    return go(term)


def _alpha_rename(term: Term) -> Term:
    used = set(free_vars(term))
    taken = set(used)

    def fresh(base: str) -> str:
        if base not in taken:
            taken.add(base)
            return base
        k = 2
        while f"{base}_{k}" in taken:
            k += 1
        name = f"{base}_{k}"
        taken.add(name)
        return name

    def go(node: Term, scope: dict[str, str]) -> Term:
        if isinstance(node, Ref):
            return Ref(node.label, scope.get(node.name, node.name))
        if isinstance(node, Abs):
            new = fresh(node.binder)
            inner = dict(scope)
            inner[node.binder] = new
            return Abs(node.label, new, go(node.body, inner))
        return App(node.label, go(node.fn, scope), go(node.arg, scope))

    return go(term, {})


def alpha_rename(term: Term) -> Term:
    """Rename binders so all are distinct and disjoint from free names."""
    return _alpha_rename(term)
