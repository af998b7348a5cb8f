"""Quasi-boolean and finite Kripke models: checking, forcing, validity.

A quasi-boolean model is a non-empty domain M with a 0/1 valuation on
closed atoms and closed implications, subject to two closure conditions
(consequent truth forces the implication; a true implication forces a
false antecedent or a true consequent).  Kripke models generalize this
with a poset of worlds, monotone domains and a monotone valuation; in
weak-disjunction mode disjunction values are also stored explicitly.

Valuation keys are Formula objects whose terms are free-variable terms
named after domain elements.  A missing key is an error, never a silent
0, so signature mistakes surface immediately.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import (
    And,
    Atom,
    CONST,
    Exists,
    FREE,
    Forall,
    Formula,
    Impl,
    Or,
    ParseError,
    Sequent,
    Top,
    Term,
    complexity,
    free,
    free_vars,
    fstr,
    parse_formula,
    substitute,
)


class ModelError(ValueError):
    pass


def elem(name: str) -> Term:
    """Domain elements are injected into term position as free variables."""
    return free(name)


# ---------------------------------------------------------------------------
# Quasi-boolean models
# ---------------------------------------------------------------------------


@dataclass
class QuasiBooleanModel:
    domain: tuple[str, ...]
    const_interp: dict[str, str] = field(default_factory=dict)
    valuation: dict[Formula, int] = field(default_factory=dict)
    partial: bool = False  # some oracle-backed entries were indeterminate

    def __post_init__(self):
        if not self.domain:
            raise ModelError("domain must be non-empty")


def to_key(f: Formula, domain: tuple[str, ...],
           const_interp: dict[str, str],
           assignment: dict[str, str] | None = None) -> Formula:
    """Ground a formula: map constants and free variables to elements."""
    assignment = assignment or {}

    def conv(t: Term) -> Term:
        if t.kind == CONST:
            if t.name in domain:
                return elem(t.name)
            if t.name not in const_interp:
                raise ModelError(f"uninterpreted constant {t.name}")
            return elem(const_interp[t.name])
        if t.kind == FREE:
            name = assignment.get(t.name, t.name)
            if name not in domain:
                raise ModelError(f"free variable {t.name} not assigned an element")
            return elem(name)
        return t

    match f:
        case Top():
            return f
        case Atom(pred, args):
            return Atom(pred, tuple(conv(a) for a in args))
        case And(l, r):
            return And(to_key(l, domain, const_interp, assignment),
                       to_key(r, domain, const_interp, assignment))
        case Or(l, r):
            return Or(to_key(l, domain, const_interp, assignment),
                      to_key(r, domain, const_interp, assignment))
        case Impl(l, r):
            return Impl(to_key(l, domain, const_interp, assignment),
                        to_key(r, domain, const_interp, assignment))
        case Forall(v, b):
            return Forall(v, to_key(b, domain, const_interp, assignment))
        case Exists(v, b):
            return Exists(v, to_key(b, domain, const_interp, assignment))
    raise TypeError(f"not a formula: {f!r}")


def _force_qb(m: QuasiBooleanModel, f: Formula) -> bool:
    """Forcing on grounded formulas (atoms and implications are lookups)."""
    match f:
        case Top():
            return True
        case Atom(_, _) | Impl(_, _):
            if f not in m.valuation:
                raise ModelError(f"no valuation entry for {fstr(f)}")
            return m.valuation[f] == 1
        case And(l, r):
            return _force_qb(m, l) and _force_qb(m, r)
        case Or(l, r):
            return _force_qb(m, l) or _force_qb(m, r)
        case Forall(v, b):
            return all(_force_qb(m, substitute(b, v, elem(u))) for u in m.domain)
        case Exists(v, b):
            return any(_force_qb(m, substitute(b, v, elem(u))) for u in m.domain)
    raise TypeError(f"not a formula: {f!r}")


def eval_qb(m: QuasiBooleanModel, f: Formula,
            assignment: dict[str, str] | None = None) -> bool:
    return _force_qb(m, to_key(f, m.domain, m.const_interp, assignment))


def check_qb_valuation(m: QuasiBooleanModel) -> list[str]:
    """Verify both quasi-boolean conditions on every implication key."""
    violations = []
    impls = sorted((k for k in m.valuation if isinstance(k, Impl)),
                   key=lambda k: (complexity(k), fstr(k)))
    for k in impls:
        try:
            if _force_qb(m, k.right) and m.valuation[k] != 1:
                violations.append(
                    f"condition 1 at {fstr(k)}: consequent holds but value is 0")
            if m.valuation[k] == 1 and _force_qb(m, k.left) \
                    and not _force_qb(m, k.right):
                violations.append(
                    f"condition 2 at {fstr(k)}: antecedent holds, consequent fails")
        except ModelError as e:
            violations.append(f"at {fstr(k)}: {e}")
    return violations


def sequent_valid_qb(m: QuasiBooleanModel, s: Sequent) -> bool:
    """All-assignments validity; empty disjunction counts as false."""
    names = sorted({v for f in s.ant | s.suc for v in free_vars(f)})
    for combo in itertools.product(m.domain, repeat=len(names)):
        asg = dict(zip(names, combo))
        if all(eval_qb(m, f, asg) for f in s.ant) and \
                not any(eval_qb(m, f, asg) for f in s.suc):
            return False
    return True


# ---------------------------------------------------------------------------
# Kripke models
# ---------------------------------------------------------------------------


@dataclass
class KripkeModel:
    worlds: tuple[str, ...]
    order: frozenset[tuple[str, str]]  # reflexive-transitive, pairs (u, v), u <= v
    domains: dict[str, tuple[str, ...]]
    const_interp: dict[str, str] = field(default_factory=dict)
    valuation: dict[tuple[str, Formula], int] = field(default_factory=dict)
    wd_mode: bool = False

    def leq(self, u: str, v: str) -> bool:
        return (u, v) in self.order

    def above(self, u: str) -> list[str]:
        return [v for v in self.worlds if self.leq(u, v)]


def closure(worlds, pairs) -> frozenset[tuple[str, str]]:
    """Reflexive-transitive closure of an order sketch."""
    rel = {(u, u) for u in worlds} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


def _force_kripke(m: KripkeModel, u: str, f: Formula) -> bool:
    match f:
        case Top():
            return True
        case Atom(_, _) | Impl(_, _):
            if (u, f) not in m.valuation:
                raise ModelError(f"no valuation entry for {fstr(f)} at {u}")
            return m.valuation[(u, f)] == 1
        case And(l, r):
            return _force_kripke(m, u, l) and _force_kripke(m, u, r)
        case Or(l, r):
            if m.wd_mode:
                # weak disjunction: the value is stored, not computed
                if (u, f) not in m.valuation:
                    raise ModelError(f"no valuation entry for {fstr(f)} at {u}")
                return m.valuation[(u, f)] == 1
            return _force_kripke(m, u, l) or _force_kripke(m, u, r)
        case Exists(v, b):
            return any(_force_kripke(m, u, substitute(b, v, elem(c)))
                       for c in m.domains[u])
        case Forall(v, b):
            return all(_force_kripke(m, w, substitute(b, v, elem(c)))
                       for w in m.above(u) for c in m.domains[w])
    raise TypeError(f"not a formula: {f!r}")


def eval_kripke(m: KripkeModel, u: str, f: Formula,
                assignment: dict[str, str] | None = None) -> bool:
    key = to_key(f, m.domains[u], m.const_interp, assignment)
    return _force_kripke(m, u, key)


def check_kripke_model(m: KripkeModel) -> list[str]:
    out = []
    for u in m.worlds:
        if (u, u) not in m.order:
            out.append(f"order not reflexive at {u}")
    for (a, b) in m.order:
        if a not in m.worlds or b not in m.worlds:
            out.append(f"order mentions unknown world in {(a, b)}")
        if a != b and (b, a) in m.order:
            out.append(f"order not antisymmetric on {a}, {b}")
    for (a, b), (c, d) in itertools.product(m.order, m.order):
        if b == c and (a, d) not in m.order:
            out.append(f"order not transitive via {a} <= {b} <= {d}")
    for u in m.worlds:
        if not m.domains.get(u):
            out.append(f"empty or missing domain at {u}")
    for (u, v) in m.order:
        if u != v and not set(m.domains.get(u, ())) <= set(m.domains.get(v, ())):
            out.append(f"domain not monotone from {u} to {v}")
    # valuation monotonicity
    for (u, k), val in m.valuation.items():
        if val != 1:
            continue
        for v in m.above(u):
            if m.valuation.get((v, k)) != 1:
                out.append(f"valuation not monotone for {fstr(k)} from {u} to {v}")
    if out:
        return out
    # implication conditions, in stratified complexity order
    impls = sorted(((u, k) for (u, k) in m.valuation if isinstance(k, Impl)),
                   key=lambda uk: (complexity(uk[1]), uk[0], fstr(uk[1])))
    for u, k in impls:
        try:
            if _force_kripke(m, u, k.right) and m.valuation[(u, k)] != 1:
                out.append(f"condition 1 at {u}: {fstr(k)}")
            if m.valuation[(u, k)] == 1:
                for v in m.above(u):
                    if _force_kripke(m, v, k.left) and \
                            not _force_kripke(m, v, k.right):
                        out.append(f"condition 2 at {v}: {fstr(k)}")
        except ModelError as e:
            out.append(f"at {u}, {fstr(k)}: {e}")
    if m.wd_mode:
        for (u, k), val in m.valuation.items():
            if not isinstance(k, Or):
                continue
            try:
                if (_force_kripke(m, u, k.left) or _force_kripke(m, u, k.right)) \
                        and val != 1:
                    out.append(f"weak disjunction condition at {u}: {fstr(k)}")
            except ModelError as e:
                out.append(f"at {u}, {fstr(k)}: {e}")
    return out


def sequent_valid_kripke(m: KripkeModel, s: Sequent) -> bool:
    if len(s.suc) != 1:
        raise ModelError("Kripke validity needs a single-formula succedent")
    (goal,) = s.suc
    names = sorted({v for f in s.ant | s.suc for v in free_vars(f)})
    for u in m.worlds:
        for combo in itertools.product(m.domains[u], repeat=len(names)):
            asg = dict(zip(names, combo))
            if all(eval_kripke(m, u, f, asg) for f in s.ant) and \
                    not eval_kripke(m, u, goal, asg):
                return False
    return True


# ---------------------------------------------------------------------------
# Key collection (signature closure for generated and extracted models)
# ---------------------------------------------------------------------------


def instance_keys(f: Formula, domain: tuple[str, ...],
                  const_interp: dict[str, str]) -> set[Formula]:
    """All closed atom and implication instances reachable from f over M.

    Quantifiers are expanded over the whole domain; both sides of an
    implication are included so the closure conditions can be checked.
    """
    out: set[Formula] = set()

    def walk(g: Formula) -> None:
        match g:
            case Top():
                pass
            case Atom(_, _):
                out.add(g)
            case And(l, r) | Or(l, r):
                walk(l)
                walk(r)
            case Impl(l, r):
                out.add(g)
                walk(l)
                walk(r)
            case Forall(v, b) | Exists(v, b):
                for u in domain:
                    walk(substitute(b, v, elem(u)))

    walk(to_key(f, domain, const_interp))
    return out


# ---------------------------------------------------------------------------
# Model text format
# ---------------------------------------------------------------------------
#
#   worlds: u, v
#   order: u <= v
#   domain u: c, d
#   const c1: d
#   val u: P(c)=1
#   val u: (p -> q)=0
#   wd: true
#
# Quasi-boolean models drop the world machinery:
#
#   domain: c, d
#   const c1: d
#   val: P(c)=1


def _parse_val_formula(text: str, domain: tuple[str, ...]) -> Formula:
    f = parse_formula(text)

    def conv(t: Term) -> Term:
        if t.name in domain:
            return elem(t.name)
        return t

    def walk(g: Formula) -> Formula:
        match g:
            case Top():
                return g
            case Atom(pred, args):
                return Atom(pred, tuple(conv(a) for a in args))
            case And(l, r):
                return And(walk(l), walk(r))
            case Or(l, r):
                return Or(walk(l), walk(r))
            case Impl(l, r):
                return Impl(walk(l), walk(r))
            case Forall(v, b):
                return Forall(v, walk(b))
            case Exists(v, b):
                return Exists(v, walk(b))

    return walk(f)


def _split_csv(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def parse_model(text: str) -> QuasiBooleanModel | KripkeModel:
    worlds: list[str] = []
    pairs: list[tuple[str, str]] = []
    domains: dict[str, list[str]] = {}
    qb_domain: list[str] = []
    const_interp: dict[str, str] = {}
    vals: list[tuple[str | None, str, int]] = []
    wd = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, rest = line.split(":", 1)
        except ValueError:
            raise ModelError(f"line {lineno}: expected 'key: value'")
        head, rest = head.strip(), rest.strip()
        if head == "worlds":
            worlds = _split_csv(rest)
        elif head == "order":
            try:
                u, v = (p.strip() for p in rest.split("<="))
            except ValueError:
                raise ModelError(f"line {lineno}: expected 'order: u <= v'")
            pairs.append((u, v))
        elif head == "domain":
            qb_domain = _split_csv(rest)
        elif head.startswith("domain "):
            domains[head.split(None, 1)[1]] = _split_csv(rest)
        elif head.startswith("const "):
            const_interp[head.split(None, 1)[1]] = rest
        elif head == "wd":
            wd = rest.lower() in ("true", "1", "yes")
        elif head == "val" or head.startswith("val "):
            world = head.split(None, 1)[1] if " " in head else None
            if "=" not in rest:
                raise ModelError(f"line {lineno}: expected 'val: formula=0|1'")
            ftext, _, vtext = rest.rpartition("=")
            if vtext.strip() not in ("0", "1"):
                raise ModelError(f"line {lineno}: value must be 0 or 1")
            vals.append((world, ftext.strip(), int(vtext)))
        else:
            raise ModelError(f"line {lineno}: unknown section {head!r}")

    if worlds:
        order = closure(worlds, pairs)
        doms = {u: tuple(domains.get(u, ())) for u in worlds}
        valuation: dict[tuple[str, Formula], int] = {}
        for world, ftext, v in vals:
            if world is None or world not in worlds:
                raise ModelError(f"val line names unknown world {world!r}")
            try:
                key = _parse_val_formula(ftext, doms[world])
            except ParseError as e:
                raise ModelError(f"bad valuation formula {ftext!r}: {e}")
            valuation[(world, key)] = v
        return KripkeModel(tuple(worlds), order, doms, const_interp,
                           valuation, wd_mode=wd)

    domain = tuple(qb_domain)
    if not domain:
        raise ModelError("model has neither worlds nor a domain")
    qval: dict[Formula, int] = {}
    for world, ftext, v in vals:
        if world is not None:
            raise ModelError("world-tagged valuation in a one-world model")
        try:
            key = _parse_val_formula(ftext, domain)
        except ParseError as e:
            raise ModelError(f"bad valuation formula {ftext!r}: {e}")
        qval[key] = v
    return QuasiBooleanModel(domain, const_interp, qval)


def _val_key_str(f: Formula) -> str:
    s = fstr(f)
    return f"({s})" if isinstance(f, (Impl, Or)) else s


def serialize_model(m: QuasiBooleanModel | KripkeModel) -> str:
    lines = []
    if isinstance(m, QuasiBooleanModel):
        lines.append(f"domain: {', '.join(m.domain)}")
        for c in sorted(m.const_interp):
            lines.append(f"const {c}: {m.const_interp[c]}")
        for k in sorted(m.valuation, key=fstr):
            lines.append(f"val: {_val_key_str(k)}={m.valuation[k]}")
    else:
        lines.append(f"worlds: {', '.join(m.worlds)}")
        for (u, v) in sorted(m.order):
            if u != v:
                lines.append(f"order: {u} <= {v}")
        for u in m.worlds:
            lines.append(f"domain {u}: {', '.join(m.domains[u])}")
        for c in sorted(m.const_interp):
            lines.append(f"const {c}: {m.const_interp[c]}")
        for (u, k) in sorted(m.valuation, key=lambda uk: (uk[0], fstr(uk[1]))):
            lines.append(f"val {u}: {_val_key_str(k)}={m.valuation[(u, k)]}")
        if m.wd_mode:
            lines.append("wd: true")
    return "\n".join(lines) + "\n"
