"""Formulas, sequents, parsing and printing for first-order primal logic.

The language has no function symbols.  Three pairwise-disjoint name
spaces are used for terms:

* constants        -- identifiers starting with ``c`` or quoted strings;
* free variables   -- any other identifier in term position;
* bound variables  -- introduced only by ``forall x.`` / ``exists x.``.

Because free and bound alphabets are disjoint, substitution of a term
for a bound variable can never capture anything.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator


class ParseError(ValueError):
    """Raised on malformed input; carries the character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

CONST = "const"
FREE = "free"
BOUND = "bound"


@dataclass(frozen=True)
class Term:
    kind: str  # CONST, FREE or BOUND
    name: str

    def __post_init__(self):
        if self.kind not in (CONST, FREE, BOUND):
            raise ValueError(f"bad term kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == CONST and not self.name.startswith("c"):
            return f'"{self.name}"'
        return self.name


def const(name: str) -> Term:
    return Term(CONST, name)


def free(name: str) -> Term:
    return Term(FREE, name)


def bound(name: str) -> Term:
    return Term(BOUND, name)


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Impl(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


TOP = Top()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

# precedence levels: -> is 0 (right assoc), | is 1, & is 2, everything
# else binds tightest.  Quantifier bodies are printed at the tight level,
# matching the grammar where `forall x.` scopes over a single unary item.

def fstr(f: Formula) -> str:
    return _fstr(f, 0)


def _fstr(f: Formula, level: int) -> str:
    match f:
        case Top():
            return "T"
        case Atom(pred, args):
            if not args:
                return pred
            return f"{pred}({', '.join(str(a) for a in args)})"
        case Impl(l, r):
            s = f"{_fstr(l, 1)} -> {_fstr(r, 0)}"
            return f"({s})" if level > 0 else s
        case Or(l, r):
            s = f"{_fstr(l, 1)} | {_fstr(r, 2)}"
            return f"({s})" if level > 1 else s
        case And(l, r):
            s = f"{_fstr(l, 2)} & {_fstr(r, 3)}"
            return f"({s})" if level > 2 else s
        case Forall(v, b):
            return f"forall {v}. {_fstr(b, 3)}"
        case Exists(v, b):
            return f"exists {v}. {_fstr(b, 3)}"
    raise TypeError(f"not a formula: {f!r}")


def formula_key(f: Formula) -> str:
    """Total order on formulas: their canonical serialization."""
    return fstr(f)


def sorted_formulas(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(fs, key=formula_key)


# ---------------------------------------------------------------------------
# Sequents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequent:
    """Finite-set sequent.  Both sides are duplicate-free by construction."""

    ant: frozenset[Formula]
    suc: frozenset[Formula]

    @staticmethod
    def of(ant: Iterable[Formula], suc: Iterable[Formula]) -> "Sequent":
        return Sequent(frozenset(ant), frozenset(suc))

    def __str__(self) -> str:
        left = ", ".join(fstr(f) for f in sorted_formulas(self.ant))
        right = ", ".join(fstr(f) for f in sorted_formulas(self.suc))
        return f"{left} => {right}".strip()


def sequent_str(s: Sequent) -> str:
    return str(s)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(->|=>|[()|&,.]|"[^"]*"|[A-Za-z_][A-Za-z0-9_\']*|\S)')


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            break
        toks.append((m.group(1), m.start(1)))
        i = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, arities: dict[str, int] | None = None):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        # predicate -> arity, fixed by first use within one input
        self.arities: dict[str, int] = arities if arities is not None else {}
        self.binders: list[str] = []
        self.free_names: set[str] = set()
        self.bound_names: set[str] = set()

    def error(self, msg: str) -> ParseError:
        at = self.toks[self.pos][1] if self.pos < len(self.toks) else len(self.text)
        return ParseError(msg, at)

    def peek(self) -> str | None:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            self.pos -= 1
            raise self.error(f"expected {tok!r}, got {got!r}")

    # grammar: impl := or ('->' impl)? ; or := and ('|' and)* ;
    # and := unary ('&' unary)* ; unary := T | quantifier | atom | '(' impl ')'

    def formula(self) -> Formula:
        left = self.or_expr()
        if self.peek() == "->":
            self.next()
            return Impl(left, self.formula())
        return left

    def or_expr(self) -> Formula:
        f = self.and_expr()
        while self.peek() == "|":
            self.next()
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if tok in ("forall", "exists"):
            self.next()
            var = self.next()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", var):
                self.pos -= 1
                raise self.error(f"bad bound variable name {var!r}")
            if var.startswith("c"):
                self.pos -= 1
                raise self.error(
                    f"bound variable {var!r} clashes with the constant namespace"
                )
            self.bound_names.add(var)
            self.expect(".")
            self.binders.append(var)
            body = self.unary()
            self.binders.pop()
            return Forall(var, body) if tok == "forall" else Exists(var, body)
        if tok == "T":
            self.next()
            return TOP
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            self.next()
            if tok in self.binders:
                self.pos -= 1
                raise self.error(f"bound variable {tok!r} used as a predicate")
            args: tuple[Term, ...] = ()
            if self.peek() == "(":
                self.next()
                arglist = [self.term()]
                while self.peek() == ",":
                    self.next()
                    arglist.append(self.term())
                self.expect(")")
                args = tuple(arglist)
            arity = self.arities.setdefault(tok, len(args))
            if arity != len(args):
                raise self.error(
                    f"predicate {tok!r} used with arity {len(args)}, "
                    f"first declared with arity {arity}"
                )
            return Atom(tok, args)
        raise self.error(f"unexpected token {tok!r}")

    def term(self) -> Term:
        tok = self.next()
        if tok.startswith('"') and tok.endswith('"') and len(tok) >= 2:
            return const(tok[1:-1])
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            self.pos -= 1
            raise self.error(f"bad term {tok!r}")
        if tok in self.binders:
            return bound(tok)
        if tok.startswith("c"):
            return const(tok)
        self.free_names.add(tok)
        return free(tok)

    def check_namespaces(self) -> None:
        clash = self.free_names & self.bound_names
        if clash:
            raise ParseError(
                f"names used both free and bound: {sorted(clash)}", 0
            )

    def at_end(self) -> bool:
        return self.pos == len(self.toks)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    if p.at_end():
        raise ParseError("empty input", 0)
    f = p.formula()
    if not p.at_end():
        raise p.error("trailing input")
    p.check_namespaces()
    return f


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    if p.at_end():
        raise ParseError("empty input", 0)

    def side(stop: str | None) -> list[Formula]:
        out: list[Formula] = []
        if p.peek() in (stop, None):
            return out
        out.append(p.formula())
        while p.peek() == ",":
            p.next()
            out.append(p.formula())
        return out

    ant = side("=>")
    p.expect("=>")
    suc = side(None)
    if not p.at_end():
        raise p.error("trailing input")
    p.check_namespaces()
    return Sequent.of(ant, suc)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if not p.at_end():
        raise p.error("trailing input")
    return t


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Replace occurrences of the bound variable `var` by term `t`.

    Occurrences under a shadowing quantifier of the same name are left
    alone.  `t` must be a constant or a free variable.
    """
    if t.kind == BOUND:
        raise ValueError("substitution term must be a constant or free variable")
    match f:
        case Top():
            return f
        case Atom(pred, args):
            if any(a.kind == BOUND and a.name == var for a in args):
                return Atom(
                    pred,
                    tuple(t if a.kind == BOUND and a.name == var else a for a in args),
                )
            return f
        case And(l, r):
            return And(substitute(l, var, t), substitute(r, var, t))
        case Or(l, r):
            return Or(substitute(l, var, t), substitute(r, var, t))
        case Impl(l, r):
            return Impl(substitute(l, var, t), substitute(r, var, t))
        case Forall(v, b):
            return f if v == var else Forall(v, substitute(b, var, t))
        case Exists(v, b):
            return f if v == var else Exists(v, substitute(b, var, t))
    raise TypeError(f"not a formula: {f!r}")


def abstract(f: Formula, name: str, var: str) -> Formula:
    """Inverse of substitute: turn free variable `name` into bound `var`."""
    match f:
        case Top():
            return f
        case Atom(pred, args):
            return Atom(
                pred,
                tuple(bound(var) if a.kind == FREE and a.name == name else a
                      for a in args),
            )
        case And(l, r):
            return And(abstract(l, name, var), abstract(r, name, var))
        case Or(l, r):
            return Or(abstract(l, name, var), abstract(r, name, var))
        case Impl(l, r):
            return Impl(abstract(l, name, var), abstract(r, name, var))
        case Forall(v, b):
            return f if v == var else Forall(v, abstract(b, name, var))
        case Exists(v, b):
            return f if v == var else Exists(v, abstract(b, name, var))
    raise TypeError(f"not a formula: {f!r}")


def replace_free(f: Formula, name: str, t: Term) -> Formula:
    """Replace the free variable `name` by term `t` everywhere in f."""
    if t.kind == BOUND:
        raise ValueError("replacement term must be a constant or free variable")
    match f:
        case Top():
            return f
        case Atom(pred, args):
            return Atom(
                pred,
                tuple(t if a.kind == FREE and a.name == name else a for a in args),
            )
        case And(l, r):
            return And(replace_free(l, name, t), replace_free(r, name, t))
        case Or(l, r):
            return Or(replace_free(l, name, t), replace_free(r, name, t))
        case Impl(l, r):
            return Impl(replace_free(l, name, t), replace_free(r, name, t))
        case Forall(v, b):
            return Forall(v, replace_free(b, name, t))
        case Exists(v, b):
            return Exists(v, replace_free(b, name, t))
    raise TypeError(f"not a formula: {f!r}")


def _terms(f: Formula) -> Iterator[Term]:
    match f:
        case Atom(_, args):
            yield from args
        case And(l, r) | Or(l, r) | Impl(l, r):
            yield from _terms(l)
            yield from _terms(r)
        case Forall(_, b) | Exists(_, b):
            yield from _terms(b)


def free_vars(f: Formula) -> set[str]:
    return {t.name for t in _terms(f) if t.kind == FREE}


def constants(f: Formula) -> set[str]:
    return {t.name for t in _terms(f) if t.kind == CONST}


def sequent_free_vars(s: Sequent) -> set[str]:
    out: set[str] = set()
    for f in s.ant | s.suc:
        out |= free_vars(f)
    return out


def sequent_constants(s: Sequent) -> set[str]:
    out: set[str] = set()
    for f in s.ant | s.suc:
        out |= constants(f)
    return out


def binder_names(f: Formula) -> set[str]:
    match f:
        case And(l, r) | Or(l, r) | Impl(l, r):
            return binder_names(l) | binder_names(r)
        case Forall(v, b) | Exists(v, b):
            return {v} | binder_names(b)
        case _:
            return set()


def sequent_names(s: Sequent) -> set[str]:
    """Every identifier in the sequent: frees, constants and binders."""
    out: set[str] = set()
    for f in s.ant | s.suc:
        out |= free_vars(f) | constants(f) | binder_names(f)
    return out


def predicates(f: Formula) -> set[tuple[str, int]]:
    match f:
        case Top():
            return set()
        case Atom(pred, args):
            return {(pred, len(args))}
        case And(l, r) | Or(l, r) | Impl(l, r):
            return predicates(l) | predicates(r)
        case Forall(_, b) | Exists(_, b):
            return predicates(b)
    raise TypeError(f"not a formula: {f!r}")


def has_quantifier(f: Formula) -> bool:
    match f:
        case Forall(_, _) | Exists(_, _):
            return True
        case And(l, r) | Or(l, r) | Impl(l, r):
            return has_quantifier(l) or has_quantifier(r)
        case _:
            return False


def is_harrop(f: Formula) -> bool:
    """Harrop grammar: T | atom | H&H | B->H | forall x. H."""
    match f:
        case Top() | Atom(_, _):
            return True
        case And(l, r):
            return is_harrop(l) and is_harrop(r)
        case Impl(_, r):
            return is_harrop(r)
        case Forall(_, b):
            return is_harrop(b)
        case _:
            return False


def complexity(f: Formula) -> int:
    """Nesting depth of implications on the consequent side.

    Atoms are 0, conjunction and disjunction take the max of their
    arguments, an implication is the consequent's value plus one, and
    quantifiers preserve the body's value.
    """
    match f:
        case Top() | Atom(_, _):
            return 0
        case And(l, r) | Or(l, r):
            return max(complexity(l), complexity(r))
        case Impl(_, r):
            return complexity(r) + 1
        case Forall(_, b) | Exists(_, b):
            return complexity(b)
    raise TypeError(f"not a formula: {f!r}")


def height(f: Formula) -> int:
    """Height of the parse tree (used as the cut-formula grade)."""
    match f:
        case Top() | Atom(_, _):
            return 1
        case And(l, r) | Or(l, r) | Impl(l, r):
            return 1 + max(height(l), height(r))
        case Forall(_, b) | Exists(_, b):
            return 1 + height(b)
    raise TypeError(f"not a formula: {f!r}")


def fresh_free_names(avoid: set[str], prefix: str = "v") -> Iterator[str]:
    """Yield v0, v1, ... skipping names in `avoid`."""
    n = 0
    while True:
        name = f"{prefix}{n}"
        if name not in avoid:
            yield name
        n += 1
