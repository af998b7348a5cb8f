"""Proof search: the multi-conclusion reduction tree and backward search.

Multi-conclusion calculi are decided by an 11-phase round-robin
reduction tree.  Each phase decomposes one connective family; closed
branches (antecedent meets succedent, or T on the right) reassemble
into derivations, and a saturated branch (a full phase cycle changes
nothing) yields a quasi-boolean countermodel which is verified before
a Refuted verdict is reported.

Single-conclusion calculi use iterative-deepening backward search over
the cut-free rules with a bounded term universe and a loop check;
Refuted there means finite failure of the whole search space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .calculus import (
    AND_L,
    AND_R,
    AXIOM,
    Calculus,
    Derivation,
    EXISTS_L,
    EXISTS_R,
    FORALL_L,
    FORALL_R,
    IMPL_L,
    IMPL_RP,
    OR_L,
    OR_R,
    ProofError,
    TOP_AXIOM,
    WEAKENING,
    axiom,
    calculus,
    top_axiom,
    weaken_to,
)
from .semantics import (
    QuasiBooleanModel,
    check_qb_valuation,
    elem,
    instance_keys,
    sequent_valid_qb,
    to_key,
)
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
    Sequent,
    TOP,
    Term,
    Top,
    complexity,
    formula_key,
    free,
    fstr,
    has_quantifier,
    sequent_names,
    sorted_formulas,
    substitute,
)

PROVED = "proved"
REFUTED = "refuted"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000
    max_branch_nodes: int = 330
    max_fresh_vars: int = 2

    def __post_init__(self):
        if min(self.max_steps, self.max_branch_nodes, self.max_fresh_vars) <= 0:
            raise ValueError("budget fields must be positive")


@dataclass
class Verdict:
    status: str
    derivation: Optional[Derivation] = None
    model: Optional[QuasiBooleanModel] = None
    branch: tuple[Sequent, ...] = ()
    counters: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == PROVED


# ---------------------------------------------------------------------------
# Branch states and the 11-phase schedule
# ---------------------------------------------------------------------------

LEFT, RIGHT = "L", "R"


@dataclass(frozen=True)
class BranchState:
    sequent: Sequent
    step: int = 0
    applied: frozenset = frozenset()            # (side, formula) pairs
    available: tuple[Term, ...] = ()            # ordered domain candidates
    usage: frozenset = frozenset()              # (side, formula, term) triples
    fresh_idx: int = 0


def _pool_name(forbidden: set[str], idx: int) -> str:
    n = 0
    produced = 0
    while True:
        name = f"v{n}"
        if name not in forbidden:
            if produced == idx:
                return name
            produced += 1
        n += 1


def _sequent_terms(s: Sequent) -> list[Term]:
    from .syntax import _terms

    seen: set[Term] = set()
    for f in sorted_formulas(s.ant) + sorted_formulas(s.suc):
        for t in _terms(f):
            if t.kind != "bound":
                seen.add(t)
    return sorted(seen, key=lambda t: (t.kind, t.name))


def initial_state(s: Sequent) -> BranchState:
    available = tuple(_sequent_terms(s))
    fresh_idx = 0
    if not available:
        # models need a non-empty domain; make one variable available
        available = (free(_pool_name(sequent_names(s), 0)),)
        fresh_idx = 1
    return BranchState(s, 0, frozenset(), available, frozenset(), fresh_idx)


@dataclass
class _Red:
    """One rule application recorded during a linear phase."""

    rule: str
    principal: Formula
    witness: Optional[Term] = None
    eigen: Optional[str] = None
    add_left: frozenset = frozenset()
    add_right: frozenset = frozenset()


def _unapplied(side: str, fs, applied, shape) -> list[Formula]:
    return [f for f in sorted_formulas(fs)
            if isinstance(f, shape) and (side, f) not in applied]


def _reduction_step(b: BranchState, weak: bool, forbidden: set[str]):
    """Children plus the bookkeeping needed to reassemble derivations.

    Returns (children, info); info is ("linear", reds) for one-child
    phases and ("branch", items) for the 2^n phases, where each item is
    (rule, principal, option0, option1) with options as (addL, addR).
    """
    phase = b.step % 11
    G, D = b.sequent.ant, b.sequent.suc
    nxt = b.step + 1

    def linear(reds: list[_Red], marks=(), uses=(), new_avail=(), fresh_idx=None):
        ant, suc = set(G), set(D)
        for r in reds:
            ant |= r.add_left
            suc |= r.add_right
        child = BranchState(
            Sequent.of(ant, suc), nxt,
            b.applied | frozenset(marks),
            b.available + tuple(new_avail),
            b.usage | frozenset(uses),
            b.fresh_idx if fresh_idx is None else fresh_idx,
        )
        return [child], ("linear", reds)

    if phase == 0:
        todo = _unapplied(LEFT, G, b.applied, And)
        return linear(
            [_Red(AND_L, f, add_left=frozenset({f.left, f.right})) for f in todo],
            marks=[(LEFT, f) for f in todo])
    if phase == 1 or (phase == 2 and not weak):
        if phase == 1:
            todo = _unapplied(RIGHT, D, b.applied, And)
            items = [(AND_R, f,
                      (frozenset(), frozenset({f.left})),
                      (frozenset(), frozenset({f.right}))) for f in todo]
            marks = [(RIGHT, f) for f in todo]
        else:
            todo = _unapplied(LEFT, G, b.applied, Or)
            items = [(OR_L, f,
                      (frozenset({f.left}), frozenset()),
                      (frozenset({f.right}), frozenset())) for f in todo]
            marks = [(LEFT, f) for f in todo]
        children = []
        for bits in itertools.product((0, 1), repeat=len(items)):
            ant, suc = set(G), set(D)
            for bit, (_, _, o0, o1) in zip(bits, items):
                addl, addr = o1 if bit else o0
                ant |= addl
                suc |= addr
            children.append(BranchState(
                Sequent.of(ant, suc), nxt, b.applied | frozenset(marks),
                b.available, b.usage, b.fresh_idx))
        return children, ("branch", items)
    if phase == 2:  # weak disjunction: no left disjunction rule
        return linear([])
    if phase == 3:
        todo = _unapplied(RIGHT, D, b.applied, Or)
        return linear(
            [_Red(OR_R, f, add_right=frozenset({f.left, f.right})) for f in todo],
            marks=[(RIGHT, f) for f in todo])
    if phase == 4:
        todo = _unapplied(LEFT, G, b.applied, Impl)
        items = [(IMPL_L, f,
                  (frozenset({f.right}), frozenset()),
                  (frozenset(), frozenset({f.left}))) for f in todo]
        marks = [(LEFT, f) for f in todo]
        children = []
        for bits in itertools.product((0, 1), repeat=len(items)):
            ant, suc = set(G), set(D)
            for bit, (_, _, o0, o1) in zip(bits, items):
                addl, addr = o1 if bit else o0
                ant |= addl
                suc |= addr
            children.append(BranchState(
                Sequent.of(ant, suc), nxt, b.applied | frozenset(marks),
                b.available, b.usage, b.fresh_idx))
        return children, ("branch", items)
    if phase == 5:
        todo = _unapplied(RIGHT, D, b.applied, Impl)
        return linear(
            [_Red(IMPL_RP, f, add_right=frozenset({f.right})) for f in todo],
            marks=[(RIGHT, f) for f in todo])
    if phase in (6, 9):
        side = LEFT if phase == 6 else RIGHT
        shape = Forall if phase == 6 else Exists
        rule = FORALL_L if phase == 6 else EXISTS_R
        pool = G if phase == 6 else D
        reds, uses = [], []
        for f in sorted_formulas(pool):
            if not isinstance(f, shape):
                continue
            cands = [t for t in b.available if (side, f, t) not in b.usage]
            if not cands:
                continue  # every available term already instantiates f
            t = cands[0]
            inst = substitute(f.body, f.var, t)
            if phase == 6:
                reds.append(_Red(rule, f, witness=t,
                                 add_left=frozenset({inst})))
            else:
                reds.append(_Red(rule, f, witness=t,
                                 add_right=frozenset({inst})))
            uses.append((side, f, t))
        return linear(reds, uses=uses)
    if phase in (7, 8):
        side = RIGHT if phase == 7 else LEFT
        shape = Forall if phase == 7 else Exists
        rule = FORALL_R if phase == 7 else EXISTS_L
        pool = D if phase == 7 else G
        todo = _unapplied(side, pool, b.applied, shape)
        reds, new_avail = [], []
        idx = b.fresh_idx
        for f in todo:
            name = _pool_name(forbidden, idx)
            idx += 1
            new_avail.append(free(name))
            inst = substitute(f.body, f.var, free(name))
            if phase == 7:
                reds.append(_Red(rule, f, eigen=name,
                                 add_right=frozenset({inst})))
            else:
                reds.append(_Red(rule, f, eigen=name,
                                 add_left=frozenset({inst})))
        return linear(reds, marks=[(side, f) for f in todo],
                      new_avail=new_avail, fresh_idx=idx)
    # phase 10: copy
    return linear([])


def reduction_step(b: BranchState, weak: bool = False) -> list[BranchState]:
    forbidden = sequent_names(b.sequent) | {t.name for t in b.available}
    children, _ = _reduction_step(b, weak, forbidden)
    return children


# ---------------------------------------------------------------------------
# Tree construction, reassembly, countermodel extraction
# ---------------------------------------------------------------------------


class _OutOfBudget(Exception):
    pass


class _Saturated(Exception):
    def __init__(self, state: BranchState):
        self.state = state


@dataclass
class _Node:
    state: BranchState
    closed: bool = False
    info: tuple = ()
    children: list["_Node"] = field(default_factory=list)


def _closed(s: Sequent) -> bool:
    return bool(s.ant & s.suc) or TOP in s.suc


def _grow(state, snapshot, counters, budget, weak, forbidden) -> _Node:
    counters["steps"] += 1
    if counters["steps"] > budget.max_steps:
        raise _OutOfBudget
    seq = state.sequent
    if _closed(seq):
        return _Node(state, closed=True)
    if state.step % 11 == 0:
        content = (seq, state.available, state.usage, state.applied)
        if content == snapshot:
            raise _Saturated(state)
        snapshot = content
    if state.step >= budget.max_branch_nodes:
        raise _OutOfBudget
    children, info = _reduction_step(state, weak, forbidden)
    node = _Node(state, info=info)
    fb = forbidden | {t.name for c in children for t in c.available}
    for c in children:
        node.children.append(_grow(c, snapshot, counters, budget, weak, fb))
    return node


def _closing_derivation(seq: Sequent) -> Derivation:
    common = seq.ant & seq.suc
    if common:
        f = min(common, key=formula_key)
        return weaken_to(axiom(f), seq)
    return weaken_to(top_axiom(), seq)


def _rebuild(node: _Node) -> Derivation:
    seq = node.state.sequent
    if node.closed:
        return _closing_derivation(seq)
    kind, data = node.info
    if kind == "linear":
        d = _rebuild(node.children[0])
        seqs = [seq]
        for r in data:
            prev = seqs[-1]
            seqs.append(Sequent.of(prev.ant | r.add_left,
                                   prev.suc | r.add_right))
        d = weaken_to(d, seqs[-1])
        for i in range(len(data) - 1, -1, -1):
            r = data[i]
            d = Derivation(seqs[i], r.rule, principal=r.principal,
                           witness=r.witness, eigen=r.eigen, premises=(d,))
        return d

    def rec(i: int, cur: Sequent, idx: int) -> Derivation:
        if i == len(data):
            return weaken_to(_rebuild(node.children[idx]), cur)
        rule, pr, o0, o1 = data[i]
        s0 = Sequent.of(cur.ant | o0[0], cur.suc | o0[1])
        s1 = Sequent.of(cur.ant | o1[0], cur.suc | o1[1])
        d0 = rec(i + 1, s0, idx * 2)
        d1 = rec(i + 1, s1, idx * 2 + 1)
        return Derivation(cur, rule, principal=pr, premises=(d0, d1))

    return rec(0, seq, 0)


def extract_countermodel(trace: BranchState) -> QuasiBooleanModel:
    """Quasi-boolean model read off a saturated branch.

    Atoms hold exactly when they appear in the branch antecedent; an
    implication holds when it appears there or its consequent is forced,
    valued in increasing complexity order.
    """
    domain = tuple(t.name for t in trace.available)
    const_interp = {t.name: t.name for t in trace.available if t.kind == CONST}
    gamma, delta = trace.sequent.ant, trace.sequent.suc
    keys: set[Formula] = set()
    for f in gamma | delta:
        keys |= instance_keys(f, domain, const_interp)
    gamma_keys = {to_key(f, domain, const_interp) for f in gamma}
    m = QuasiBooleanModel(domain, const_interp, {})
    for k in sorted(keys, key=lambda k: (complexity(k), fstr(k))):
        if isinstance(k, Atom):
            m.valuation[k] = 1 if k in gamma_keys else 0
        else:
            from .semantics import _force_qb

            m.valuation[k] = 1 if (k in gamma_keys or _force_qb(m, k.right)) else 0
    return m


def build_reduction_tree(s: Sequent, budget: Budget | None = None,
                         weak: bool = False) -> Verdict:
    budget = budget or Budget()
    state = initial_state(s)
    counters = {"steps": 0}
    forbidden = sequent_names(s) | {t.name for t in state.available}
    try:
        root = _grow(state, None, counters, budget, weak, forbidden)
    except _OutOfBudget:
        return Verdict(UNKNOWN, counters=counters)
    except _Saturated as sat:
        model = extract_countermodel(sat.state)
        if not check_qb_valuation(model) and not sequent_valid_qb(model, s):
            return Verdict(REFUTED, model=model,
                           branch=(sat.state.sequent,), counters=counters)
        return Verdict(UNKNOWN, model=model, branch=(sat.state.sequent,),
                       counters=counters)
    return Verdict(PROVED, derivation=_rebuild(root), counters=counters)


# ---------------------------------------------------------------------------
# Single-conclusion backward search
# ---------------------------------------------------------------------------


def _canon(seq: Sequent, root_names: set[str]) -> str:
    """Branch-local canonical form: search variables renamed in order."""
    from .syntax import _terms, replace_free

    order: list[str] = []
    for f in sorted_formulas(seq.ant) + sorted_formulas(seq.suc):
        for t in _terms(f):
            if t.kind == FREE and t.name not in root_names and t.name not in order:
                order.append(t.name)

    def rn(f: Formula) -> Formula:
        for i, name in enumerate(order):
            f = replace_free(f, name, free(f"@{i}"))
        return f

    return str(Sequent.of((rn(f) for f in seq.ant), (rn(f) for f in seq.suc)))


class _Search:
    def __init__(self, root: Sequent, calc: Calculus, budget: Budget):
        self.calc = calc
        self.budget = budget
        self.root_names = sequent_names(root)
        self.steps = 0

    def pool(self, idx: int) -> str:
        return _pool_name(self.root_names, idx)

    def moves(self, seq: Sequent, pool_idx: int, fresh_used: int) -> Iterator:
        """Yield (rule, principal, witness, eigen, premises, pool', fresh')."""
        G = seq.ant
        (goal,) = seq.suc
        universe = _sequent_terms(seq)
        fresh_cands = []
        if fresh_used < self.budget.max_fresh_vars:
            fresh_cands = [(free(self.pool(pool_idx)), pool_idx + 1,
                            fresh_used + 1)]

        match goal:
            case And(l, r):
                yield (AND_R, goal, None, None,
                       [Sequent.of(G, [l]), Sequent.of(G, [r])],
                       pool_idx, fresh_used)
            case Or(l, r):
                yield (OR_R, goal, None, None, [Sequent.of(G, [l])],
                       pool_idx, fresh_used)
                yield (OR_R, goal, None, None, [Sequent.of(G, [r])],
                       pool_idx, fresh_used)
            case Impl(_, r):
                yield (IMPL_RP, goal, None, None, [Sequent.of(G, [r])],
                       pool_idx, fresh_used)
            case Forall(v, b):
                name = self.pool(pool_idx)
                inst = substitute(b, v, free(name))
                yield (FORALL_R, goal, None, name, [Sequent.of(G, [inst])],
                       pool_idx + 1, fresh_used)
            case Exists(v, b):
                for t in universe:
                    yield (EXISTS_R, goal, t, None,
                           [Sequent.of(G, [substitute(b, v, t)])],
                           pool_idx, fresh_used)
                for t, p2, f2 in fresh_cands:
                    yield (EXISTS_R, goal, t, None,
                           [Sequent.of(G, [substitute(b, v, t)])], p2, f2)

        for g in sorted_formulas(G):
            match g:
                case And(l, r):
                    if {l, r} <= G:
                        continue
                    yield (AND_L, g, None, None,
                           [Sequent.of(G | {l, r}, [goal])],
                           pool_idx, fresh_used)
                case Or(l, r):
                    if self.calc.weak_disjunction:
                        continue
                    yield (OR_L, g, None, None,
                           [Sequent.of(G | {l}, [goal]),
                            Sequent.of(G | {r}, [goal])],
                           pool_idx, fresh_used)
                case Impl(l, r):
                    if r in G:
                        continue  # the major premise would repeat the goal
                    yield (IMPL_L, g, None, None,
                           [Sequent.of(G | {r}, [goal]), Sequent.of(G, [l])],
                           pool_idx, fresh_used)
                case Forall(v, b):
                    for t in universe:
                        inst = substitute(b, v, t)
                        if inst in G:
                            continue
                        yield (FORALL_L, g, t, None,
                               [Sequent.of(G | {inst}, [goal])],
                               pool_idx, fresh_used)
                    for t, p2, f2 in fresh_cands:
                        yield (FORALL_L, g, t, None,
                               [Sequent.of(G | {substitute(b, v, t)}, [goal])],
                               p2, f2)
                case Exists(v, b):
                    name = self.pool(pool_idx)
                    inst = substitute(b, v, free(name))
                    yield (EXISTS_L, g, None, name,
                           [Sequent.of(G | {inst}, [goal])],
                           pool_idx + 1, fresh_used)

    def dfs(self, seq: Sequent, depth: int, path: tuple,
            pool_idx: int, fresh_used: int):
        """Return (derivation or None, truncated-by-depth flag)."""
        self.steps += 1
        if self.steps > self.budget.max_steps:
            raise _OutOfBudget
        (goal,) = seq.suc
        if goal in seq.ant:
            return weaken_to(axiom(goal), seq), False
        if goal == TOP:
            return weaken_to(top_axiom(), seq), False
        canon = _canon(seq, self.root_names)
        if canon in path:
            return None, False
        if depth == 0:
            return None, True
        path = path + (canon,)
        truncated = False
        for rule, pr, wit, eig, prems, p2, f2 in self.moves(
                seq, pool_idx, fresh_used):
            ds = []
            for ps in prems:
                d, t = self.dfs(ps, depth - 1, path, p2, f2)
                if d is None:
                    truncated = truncated or t
                    break
                ds.append(d)
            else:
                return Derivation(seq, rule, principal=pr, witness=wit,
                                  eigen=eig, premises=tuple(ds)), False
        return None, truncated


def _search_single(s: Sequent, calc: Calculus, budget: Budget) -> Verdict:
    srch = _Search(s, calc, budget)
    depth = 2
    try:
        while depth <= budget.max_branch_nodes:
            d, truncated = srch.dfs(s, depth, (), 0, 0)
            if d is not None:
                return Verdict(PROVED, derivation=d,
                               counters={"steps": srch.steps, "depth": depth})
            if not truncated:
                return Verdict(REFUTED,
                               counters={"steps": srch.steps, "depth": depth})
            depth *= 2
    except _OutOfBudget:
        pass
    return Verdict(UNKNOWN, counters={"steps": srch.steps})


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def prove(s: Sequent, calc: Calculus | str,
          budget: Budget | None = None) -> Verdict:
    if isinstance(calc, str):
        calc = calculus(calc)
    budget = budget or Budget()
    if calc.propositional and any(has_quantifier(f) for f in s.ant | s.suc):
        raise ProofError(f"quantified sequent under propositional calculus {calc}")
    if calc.multi:
        return build_reduction_tree(s, budget, weak=calc.weak_disjunction)
    if len(s.suc) != 1:
        raise ProofError(f"{calc} needs exactly one succedent formula")
    v = _search_single(s, calc, budget)
    if calc.nd and v.status == PROVED:
        from .transform import gentzen_to_nd

        v.derivation = gentzen_to_nd(v.derivation)
    return v
