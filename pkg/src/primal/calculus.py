"""Rule schemata, derivation objects, proof checking and cut elimination.

Sequent rules follow the multi-conclusion calculus; single-conclusion
calculi restrict every succedent to one formula and use the projection
form of the right disjunction rule and the single-succedent form of the
left implication rule.  Natural deduction judgements Gamma |- phi are
represented as sequents with a singleton succedent.

All checks use set semantics with implicit contraction: a rule instance
may either keep or drop its principal formula in the premises.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .syntax import (
    And,
    Atom,
    Exists,
    Forall,
    Impl,
    Or,
    Sequent,
    Term,
    TOP,
    Top,
    BOUND,
    FREE,
    formula_key,
    free,
    free_vars,
    fresh_free_names,
    fstr,
    has_quantifier,
    replace_free,
    sequent_free_vars,
    substitute,
)
from .syntax import Formula

# ---------------------------------------------------------------------------
# Calculi
# ---------------------------------------------------------------------------

CALCULI = (
    "QP", "QPW", "QGP", "QGPW", "QGPM", "QGPMW", "GP", "GPM", "GPW", "GPMW",
)


@dataclass(frozen=True)
class Calculus:
    name: str

    @property
    def nd(self) -> bool:
        return self.name in ("QP", "QPW")

    @property
    def multi(self) -> bool:
        return self.name in ("QGPM", "QGPMW", "GPM", "GPMW")

    @property
    def weak_disjunction(self) -> bool:
        return self.name.endswith("W")

    @property
    def propositional(self) -> bool:
        return self.name in ("GP", "GPM", "GPW", "GPMW")

    def __str__(self) -> str:
        return self.name


def calculus(name: str) -> Calculus:
    up = name.upper()
    if up not in CALCULI:
        raise ValueError(f"unknown calculus {name!r}")
    return Calculus(up)


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

# sequent rules
AXIOM = "Axiom"
TOP_AXIOM = "TopAxiom"
AND_L = "AndL"
AND_R = "AndR"
OR_L = "OrL"
OR_R = "OrR"
IMPL_L = "ImplL"
IMPL_RP = "ImplRp"
FORALL_L = "ForallL"
FORALL_R = "ForallR"
EXISTS_L = "ExistsL"
EXISTS_R = "ExistsR"
WEAKENING = "Weakening"
CUT = "Cut"
CD_AXIOM = "CDAxiom"  # leaf for the QGP+(CD) extended mode

# natural deduction rules
TRANS = "Trans"
AND_E1 = "AndE1"
AND_E2 = "AndE2"
AND_I = "AndI"
OR_I1 = "OrI1"
OR_I2 = "OrI2"
OR_E = "OrE"
IMPL_E = "ImplE"
IMPL_IW = "ImplIW"
FORALL_I = "ForallI"
FORALL_E = "ForallE"
EXISTS_I = "ExistsI"
EXISTS_E = "ExistsE"

SEQUENT_RULES = {
    AXIOM, TOP_AXIOM, AND_L, AND_R, OR_L, OR_R, IMPL_L, IMPL_RP,
    FORALL_L, FORALL_R, EXISTS_L, EXISTS_R, WEAKENING, CUT, CD_AXIOM,
}
ND_RULES = {
    AXIOM, TOP_AXIOM, TRANS, AND_E1, AND_E2, AND_I, OR_I1, OR_I2, OR_E,
    IMPL_E, IMPL_IW, FORALL_I, FORALL_E, EXISTS_I, EXISTS_E, WEAKENING,
}
QUANTIFIER_RULES = {
    FORALL_L, FORALL_R, EXISTS_L, EXISTS_R,
    FORALL_I, FORALL_E, EXISTS_I, EXISTS_E,
}


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    rule: str
    principal: Optional[Formula] = None
    witness: Optional[Term] = None
    eigen: Optional[str] = None
    premises: tuple["Derivation", ...] = ()

    def count_rule(self, rule: str) -> int:
        return (self.rule == rule) + sum(p.count_rule(rule) for p in self.premises)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


OK = CheckResult(True)


class ProofError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Rule instance checking
# ---------------------------------------------------------------------------


def _ctx_variants(side: frozenset, principal: Formula) -> list[frozenset]:
    """Contexts a premise may carry: principal kept or dropped."""
    return [side, side - {principal}]


def inference_error(
    conclusion: Sequent,
    premises: tuple[Sequent, ...],
    rule: str,
    principal: Optional[Formula],
    witness: Optional[Term],
    eigen: Optional[str],
    calc: Calculus,
    allow_cd: bool = False,
) -> Optional[str]:
    """Return None if the instance matches the rule schema, else a reason."""
    legal = ND_RULES if calc.nd else SEQUENT_RULES
    if rule not in legal:
        return f"rule {rule} not available in {calc}"
    if rule == CD_AXIOM and not allow_cd:
        return "CD axioms only allowed in the QGP+(CD) mode"
    if calc.weak_disjunction and rule in (OR_L, OR_E):
        return f"rule {rule} absent under weak disjunction"
    if calc.propositional:
        if rule in QUANTIFIER_RULES:
            return f"quantifier rule {rule} in propositional calculus {calc}"
        for s in (conclusion, *premises):
            if any(has_quantifier(f) for f in s.ant | s.suc):
                return "quantified formula in propositional calculus"
    single = not calc.multi
    if single:
        for s in (conclusion, *premises):
            if len(s.suc) != 1:
                return "succedent must contain exactly one formula"

    def need_principal(shape=None) -> Optional[str]:
        if principal is None:
            return "missing principal formula"
        if shape is not None and not isinstance(principal, shape):
            return f"principal has wrong shape for {rule}"
        return None

    def arity(n: int) -> Optional[str]:
        if len(premises) != n:
            return f"{rule} expects {n} premises, got {len(premises)}"
        return None

    G, D = conclusion.ant, conclusion.suc

    # --- axioms -----------------------------------------------------------
    if rule == AXIOM:
        if err := arity(0):
            return err
        if len(G) == 1 and G == D:
            return None
        return "axiom must be phi => phi"
    if rule == TOP_AXIOM:
        if err := arity(0):
            return err
        if not G and D == frozenset({TOP}):
            return None
        return "top axiom must be => T"
    if rule == CD_AXIOM:
        if err := arity(0):
            return err
        return _check_cd_shape(conclusion)

    # --- structural -------------------------------------------------------
    if rule == WEAKENING:
        if err := arity(1):
            return err
        P = premises[0]
        if not P.ant <= G:
            return "weakening premise antecedent not a subset"
        if single:
            if P.suc != D:
                return "single-conclusion weakening must keep the succedent"
        elif not P.suc <= D:
            return "weakening premise succedent not a subset"
        return None
    if rule == CUT:
        if err := arity(2):
            return err
        if err := need_principal():
            return err
        P1, P2 = premises
        if principal not in P1.suc:
            return "cut formula missing from left premise succedent"
        if principal not in P2.ant:
            return "cut formula missing from right premise antecedent"
        if G != P1.ant | (P2.ant - {principal}):
            return "cut conclusion antecedent mismatch"
        if D != (P1.suc - {principal}) | P2.suc:
            return "cut conclusion succedent mismatch"
        return None

    # --- left sequent rules ----------------------------------------------
    if rule in (AND_L, OR_L, IMPL_L, FORALL_L, EXISTS_L):
        shapes = {AND_L: And, OR_L: Or, IMPL_L: Impl,
                  FORALL_L: Forall, EXISTS_L: Exists}
        if err := need_principal(shapes[rule]):
            return err
        if principal not in G:
            return "principal formula missing from antecedent"
        ctxs = _ctx_variants(G, principal)
        if rule == AND_L:
            if err := arity(1):
                return err
            P = premises[0]
            if P.suc != D:
                return "premise succedent must equal conclusion succedent"
            adds = {principal.left, principal.right}
            if any(P.ant == ctx | adds for ctx in ctxs):
                return None
            return "AndL premise antecedent mismatch"
        if rule == OR_L:
            if err := arity(2):
                return err
            P1, P2 = premises
            if P1.suc != D or P2.suc != D:
                return "premise succedent must equal conclusion succedent"
            for ctx in ctxs:
                if P1.ant == ctx | {principal.left} and \
                        P2.ant == ctx | {principal.right}:
                    return None
            return "OrL premise antecedents mismatch"
        if rule == IMPL_L:
            if err := arity(2):
                return err
            P1, P2 = premises
            if P1.suc != D:
                return "left premise succedent must equal conclusion succedent"
            for ctx in ctxs:
                if P1.ant != ctx | {principal.right} or P2.ant != ctx:
                    continue
                if single:
                    if P2.suc == frozenset({principal.left}):
                        return None
                elif P2.suc == D | {principal.left}:
                    return None
            return "ImplL premises mismatch"
        if rule == FORALL_L:
            if err := arity(1):
                return err
            if witness is None:
                return "ForallL requires a witness term"
            if witness.kind == BOUND:
                return "witness must be a constant or free variable"
            P = premises[0]
            if P.suc != D:
                return "premise succedent must equal conclusion succedent"
            inst = substitute(principal.body, principal.var, witness)
            if any(P.ant == ctx | {inst} for ctx in ctxs):
                return None
            return "ForallL premise antecedent mismatch"
        if rule == EXISTS_L:
            if err := arity(1):
                return err
            if eigen is None:
                return "ExistsL requires an eigenvariable"
            if eigen in sequent_free_vars(conclusion):
                return f"eigenvariable {eigen} occurs free in the conclusion"
            P = premises[0]
            if P.suc != D:
                return "premise succedent must equal conclusion succedent"
            inst = substitute(principal.body, principal.var, free(eigen))
            if any(P.ant == ctx | {inst} for ctx in ctxs):
                return None
            return "ExistsL premise antecedent mismatch"

    # --- right sequent rules ---------------------------------------------
    if rule in (AND_R, OR_R, IMPL_RP, FORALL_R, EXISTS_R):
        shapes = {AND_R: And, OR_R: Or, IMPL_RP: Impl,
                  FORALL_R: Forall, EXISTS_R: Exists}
        if err := need_principal(shapes[rule]):
            return err
        if principal not in D:
            return "principal formula missing from succedent"
        ctxs = _ctx_variants(D, principal)
        if single:
            ctxs = [frozenset()]
        if rule == AND_R:
            if err := arity(2):
                return err
            P1, P2 = premises
            if P1.ant != G or P2.ant != G:
                return "premise antecedent must equal conclusion antecedent"
            for ctx in ctxs:
                if P1.suc == ctx | {principal.left} and \
                        P2.suc == ctx | {principal.right}:
                    return None
            return "AndR premise succedents mismatch"
        if rule == OR_R:
            if err := arity(1):
                return err
            P = premises[0]
            if P.ant != G:
                return "premise antecedent must equal conclusion antecedent"
            if single:
                # projection rule: premise proves one disjunct
                if P.suc in (frozenset({principal.left}),
                             frozenset({principal.right})):
                    return None
                return "OrR projection premise mismatch"
            adds = {principal.left, principal.right}
            if any(P.suc == ctx | adds for ctx in ctxs):
                return None
            return "OrR premise succedent mismatch"
        if rule == IMPL_RP:
            if err := arity(1):
                return err
            P = premises[0]
            if P.ant != G:
                return "premise antecedent must equal conclusion antecedent"
            if any(P.suc == ctx | {principal.right} for ctx in ctxs):
                return None
            return "ImplRp premise must prove the consequent"
        if rule == FORALL_R:
            if err := arity(1):
                return err
            if eigen is None:
                return "ForallR requires an eigenvariable"
            if eigen in sequent_free_vars(conclusion):
                return f"eigenvariable {eigen} occurs free in the conclusion"
            P = premises[0]
            if P.ant != G:
                return "premise antecedent must equal conclusion antecedent"
            inst = substitute(principal.body, principal.var, free(eigen))
            if any(P.suc == ctx | {inst} for ctx in ctxs):
                return None
            return "ForallR premise succedent mismatch"
        if rule == EXISTS_R:
            if err := arity(1):
                return err
            if witness is None:
                return "ExistsR requires a witness term"
            if witness.kind == BOUND:
                return "witness must be a constant or free variable"
            P = premises[0]
            if P.ant != G:
                return "premise antecedent must equal conclusion antecedent"
            inst = substitute(principal.body, principal.var, witness)
            if any(P.suc == ctx | {inst} for ctx in ctxs):
                return None
            return "ExistsR premise succedent mismatch"

    # --- natural deduction rules -----------------------------------------
    if rule in ND_RULES:
        return _nd_inference_error(
            conclusion, premises, rule, principal, witness, eigen
        )

    return f"unknown rule {rule}"


def _check_cd_shape(s: Sequent) -> Optional[str]:
    """A CD axiom is forall x.(A | B(x)) => A | forall x. B(x)."""
    if len(s.ant) != 1 or len(s.suc) != 1:
        return "CD axiom must have one formula on each side"
    (left,) = s.ant
    (right,) = s.suc
    match left, right:
        case Forall(x, Or(a1, b1)), Or(a2, Forall(y, b2)):
            probe = free("v_cd_probe")
            if substitute(a1, x, probe) != a1:
                return "CD axiom: the A disjunct must not contain the bound variable"
            if a1 != a2:
                return "CD axiom: A disjuncts differ"
            if substitute(b1, x, probe) != substitute(b2, y, probe):
                return "CD axiom: B bodies differ"
            return None
    return "CD axiom shape mismatch"


def _nd_inference_error(conclusion, premises, rule, principal, witness, eigen):
    G, D = conclusion.ant, conclusion.suc
    if len(D) != 1:
        return "natural deduction judgement needs exactly one conclusion formula"
    (phi,) = D

    def arity(n):
        if len(premises) != n:
            return f"{rule} expects {n} premises, got {len(premises)}"
        return None

    for s in premises:
        if len(s.suc) != 1:
            return "natural deduction premises need singleton conclusions"

    if rule == WEAKENING:
        if err := arity(1):
            return err
        P = premises[0]
        if P.ant <= G and P.suc == D:
            return None
        return "weakening mismatch"
    if rule == TRANS:
        if err := arity(2):
            return err
        if principal is None:
            return "Trans needs its intermediate formula as principal"
        P1, P2 = premises
        if P1.ant == G and P1.suc == frozenset({principal}) and \
                P2.ant == G | {principal} and P2.suc == D:
            return None
        return "Trans premises mismatch"
    if rule in (AND_E1, AND_E2):
        if err := arity(1):
            return err
        if not isinstance(principal, And):
            return "principal must be the conjunction being eliminated"
        P = premises[0]
        want = principal.left if rule == AND_E1 else principal.right
        if P.ant == G and P.suc == frozenset({principal}) and phi == want:
            return None
        return f"{rule} mismatch"
    if rule == AND_I:
        if err := arity(2):
            return err
        if not isinstance(phi, And):
            return "conclusion of AndI must be a conjunction"
        P1, P2 = premises
        if P1.ant == G and P2.ant == G and \
                P1.suc == frozenset({phi.left}) and P2.suc == frozenset({phi.right}):
            return None
        return "AndI mismatch"
    if rule in (OR_I1, OR_I2):
        if err := arity(1):
            return err
        if not isinstance(phi, Or):
            return "conclusion of OrI must be a disjunction"
        P = premises[0]
        want = phi.left if rule == OR_I1 else phi.right
        if P.ant == G and P.suc == frozenset({want}):
            return None
        return f"{rule} mismatch"
    if rule == OR_E:
        if err := arity(3):
            return err
        if not isinstance(principal, Or):
            return "principal must be the disjunction being eliminated"
        P1, P2, P3 = premises
        if P1.ant == G | {principal.left} and P1.suc == D and \
                P2.ant == G | {principal.right} and P2.suc == D and \
                P3.ant == G and P3.suc == frozenset({principal}):
            return None
        return "OrE mismatch"
    if rule == IMPL_E:
        if err := arity(2):
            return err
        if not isinstance(principal, Impl):
            return "principal must be the implication being eliminated"
        P1, P2 = premises
        if P1.ant == G and P1.suc == frozenset({principal.left}) and \
                P2.ant == G and P2.suc == frozenset({principal}) and \
                phi == principal.right:
            return None
        return "ImplE mismatch"
    if rule == IMPL_IW:
        if err := arity(1):
            return err
        if not isinstance(phi, Impl):
            return "conclusion of ImplIW must be an implication"
        P = premises[0]
        if P.ant == G and P.suc == frozenset({phi.right}):
            return None
        return "ImplIW premise must prove the consequent"
    if rule == FORALL_I:
        if err := arity(1):
            return err
        if not isinstance(phi, Forall):
            return "conclusion of ForallI must be universal"
        if eigen is None:
            return "ForallI requires an eigenvariable"
        if eigen in sequent_free_vars(conclusion):
            return f"eigenvariable {eigen} occurs free in the conclusion"
        P = premises[0]
        inst = substitute(phi.body, phi.var, free(eigen))
        if P.ant == G and P.suc == frozenset({inst}):
            return None
        return "ForallI mismatch"
    if rule == FORALL_E:
        if err := arity(1):
            return err
        if not isinstance(principal, Forall):
            return "principal must be the universal being eliminated"
        if witness is None or witness.kind == BOUND:
            return "ForallE requires a constant or free-variable witness"
        P = premises[0]
        inst = substitute(principal.body, principal.var, witness)
        if P.ant == G and P.suc == frozenset({principal}) and phi == inst:
            return None
        return "ForallE mismatch"
    if rule == EXISTS_I:
        if err := arity(1):
            return err
        if not isinstance(phi, Exists):
            return "conclusion of ExistsI must be existential"
        if witness is None or witness.kind == BOUND:
            return "ExistsI requires a constant or free-variable witness"
        P = premises[0]
        inst = substitute(phi.body, phi.var, witness)
        if P.ant == G and P.suc == frozenset({inst}):
            return None
        return "ExistsI mismatch"
    if rule == EXISTS_E:
        if err := arity(2):
            return err
        if not isinstance(principal, Exists):
            return "principal must be the existential being eliminated"
        if eigen is None:
            return "ExistsE requires an eigenvariable"
        if eigen in sequent_free_vars(conclusion):
            return f"eigenvariable {eigen} occurs free in the conclusion"
        if eigen in free_vars(principal):
            return f"eigenvariable {eigen} occurs free in the existential"
        P1, P2 = premises
        if P1.suc != frozenset({principal}):
            return "ExistsE first premise must prove the existential"
        inst = substitute(principal.body, principal.var, free(eigen))
        if inst not in P2.ant:
            return "ExistsE second premise must assume the instance"
        if P2.suc != D:
            return "ExistsE second premise conclusion mismatch"
        if G != P1.ant | (P2.ant - {inst}):
            return "ExistsE context merge mismatch"
        return None
    return f"unknown rule {rule}"


def check_inference(
    conclusion: Sequent,
    premises: tuple[Sequent, ...] | list[Sequent],
    rule: str,
    principal: Optional[Formula] = None,
    witness: Optional[Term] = None,
    eigen: Optional[str] = None,
    calc: Calculus | str = "QGPM",
    allow_cd: bool = False,
) -> bool:
    if isinstance(calc, str):
        calc = calculus(calc)
    return inference_error(
        conclusion, tuple(premises), rule, principal, witness, eigen, calc, allow_cd
    ) is None


def check_derivation(
    d: Derivation,
    calc: Calculus | str,
    allow_cut: bool = True,
    allow_cd: bool = False,
) -> CheckResult:
    if isinstance(calc, str):
        calc = calculus(calc)
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        if not allow_cut and node.rule in (CUT, TRANS):
            return CheckResult(False, path, f"{node.rule} not allowed here")
        err = inference_error(
            node.conclusion,
            tuple(p.conclusion for p in node.premises),
            node.rule,
            node.principal,
            node.witness,
            node.eigen,
            calc,
            allow_cd,
        )
        if err is not None:
            return CheckResult(False, path, err)
        for i, p in enumerate(node.premises):
            stack.append((p, path + (i,)))
    return OK


# ---------------------------------------------------------------------------
# Derivation utilities
# ---------------------------------------------------------------------------


def _derivation_names(d: Derivation) -> set[str]:
    from .syntax import sequent_names

    out = sequent_names(d.conclusion)
    if d.eigen:
        out.add(d.eigen)
    if d.witness is not None:
        out.add(d.witness.name)
    for p in d.premises:
        out |= _derivation_names(p)
    return out


def _map_sequent(s: Sequent, name: str, t: Term) -> Sequent:
    return Sequent.of(
        (replace_free(f, name, t) for f in s.ant),
        (replace_free(f, name, t) for f in s.suc),
    )


def subst_free_in_derivation(d: Derivation, name: str, t: Term) -> Derivation:
    """Replace a free variable throughout a derivation.

    Eigenvariables that clash with `name` or with `t` are renamed fresh
    first, so the result is again a correct derivation.
    """
    if d.eigen is not None and (d.eigen == name or
                                (t.kind == FREE and d.eigen == t.name)):
        d = rename_eigen(d)
    witness = d.witness
    if witness is not None and witness.kind == FREE and witness.name == name:
        witness = t
    return Derivation(
        _map_sequent(d.conclusion, name, t),
        d.rule,
        None if d.principal is None else replace_free(d.principal, name, t),
        witness,
        d.eigen,
        tuple(subst_free_in_derivation(p, name, t) for p in d.premises),
    )


def rename_eigen(d: Derivation, avoid: set[str] | None = None) -> Derivation:
    """Rename this node's eigenvariable to a globally fresh name."""
    assert d.eigen is not None
    taken = _derivation_names(d) | (avoid or set())
    new = next(fresh_free_names(taken))
    prems = tuple(subst_free_in_derivation(p, d.eigen, free(new))
                  for p in d.premises)
    return replace(d, eigen=new, premises=prems)


def weaken_to(d: Derivation, target: Sequent) -> Derivation:
    """Wrap a derivation in Weakening so its conclusion becomes `target`."""
    if d.conclusion == target:
        return d
    if not (d.conclusion.ant <= target.ant and d.conclusion.suc <= target.suc):
        raise ProofError(
            f"cannot weaken {d.conclusion} to {target}"
        )
    return Derivation(target, WEAKENING, premises=(d,))


def axiom(f: Formula) -> Derivation:
    return Derivation(Sequent.of([f], [f]), AXIOM)


def top_axiom() -> Derivation:
    return Derivation(Sequent.of([], [TOP]), TOP_AXIOM)


# ---------------------------------------------------------------------------
# Cut elimination (single-conclusion calculi)
# ---------------------------------------------------------------------------

_LEFT_RULES = (AND_L, OR_L, IMPL_L, FORALL_L, EXISTS_L)
_RIGHT_RULES = (AND_R, OR_R, IMPL_RP, FORALL_R, EXISTS_R)


def eliminate_cut(d: Derivation) -> Derivation:
    """Remove every Cut from a QGP/QGPW derivation.

    Innermost cuts are removed first, so each cut is reduced against
    cut-free subderivations; the reduction terminates by the usual
    grade/rank measure (the primal implication case cuts only on the
    consequent).  The result proves the same endsequent.
    """
    prems = tuple(eliminate_cut(p) for p in d.premises)
    if d.rule != CUT:
        return replace(d, premises=prems)
    left, right = prems
    out = _reduce_cut(left, right, d.principal)
    out = weaken_to(out, d.conclusion)
    return out


def _reduce_cut(L: Derivation, R: Derivation, theta: Formula) -> Derivation:
    """Cut-free derivation of L.ant u (R.ant - {theta}) => R.suc.

    L proves Gamma => theta, R proves Gamma1, theta => psi; both cut-free.
    """
    target = Sequent.of(L.conclusion.ant | (R.conclusion.ant - {theta}),
                        R.conclusion.suc)
    if theta not in R.conclusion.ant:
        return weaken_to(R, target)

    # cut formula parametric on the left: push the cut into L
    if L.rule == AXIOM:
        # L is theta => theta
        return weaken_to(R, target)
    if L.rule == WEAKENING:
        return weaken_to(_reduce_cut(L.premises[0], R, theta), target)
    if L.rule in _LEFT_RULES:
        return _push_left(L, R, theta, target)

    # L introduces theta.  If R's last rule is not a left rule on theta,
    # push the cut into R, else apply the principal reduction.
    if R.rule == AXIOM:
        # R is theta => theta
        return weaken_to(L, target)
    if R.rule == WEAKENING:
        P = R.premises[0]
        if theta not in P.conclusion.ant:
            return weaken_to(P, target)
        return weaken_to(_reduce_cut(L, P, theta), target)
    if R.rule in _LEFT_RULES and R.principal == theta:
        return _principal_reduction(L, R, theta, target)
    return _push_right(L, R, theta, target)


def _premise_targets(node: Derivation, concl: Sequent) -> list[Sequent]:
    """Premise sequents for re-applying a single-conclusion rule at `concl`.

    The principal formula is kept in the context (implicit contraction),
    so the targets only depend on the rule and the new conclusion.
    """
    pr = node.principal
    G, D = concl.ant, concl.suc
    if node.rule == AND_L:
        return [Sequent.of(G | {pr.left, pr.right}, D)]
    if node.rule == OR_L:
        return [Sequent.of(G | {pr.left}, D), Sequent.of(G | {pr.right}, D)]
    if node.rule == IMPL_L:
        return [Sequent.of(G | {pr.right}, D), Sequent.of(G, {pr.left})]
    if node.rule == FORALL_L:
        inst = substitute(pr.body, pr.var, node.witness)
        return [Sequent.of(G | {inst}, D)]
    if node.rule == EXISTS_L:
        inst = substitute(pr.body, pr.var, free(node.eigen))
        return [Sequent.of(G | {inst}, D)]
    if node.rule == AND_R:
        return [Sequent.of(G, {pr.left}), Sequent.of(G, {pr.right})]
    if node.rule == OR_R:
        # projection: keep whichever disjunct the original premise proved
        return [Sequent.of(G, p.conclusion.suc) for p in node.premises]
    if node.rule == IMPL_RP:
        return [Sequent.of(G, {pr.right})]
    if node.rule == FORALL_R:
        inst = substitute(pr.body, pr.var, free(node.eigen))
        return [Sequent.of(G, {inst})]
    if node.rule == EXISTS_R:
        inst = substitute(pr.body, pr.var, node.witness)
        return [Sequent.of(G, {inst})]
    raise ProofError(f"cannot re-apply rule {node.rule}")


def _reapply(node: Derivation, concl: Sequent,
             new_premises: list[Derivation]) -> Derivation:
    targets = _premise_targets(node, concl)
    prems = tuple(weaken_to(d, t) for d, t in zip(new_premises, targets))
    return Derivation(concl, node.rule, principal=node.principal,
                      witness=node.witness, eigen=node.eigen, premises=prems)


def _push_left(L: Derivation, R: Derivation, theta, target) -> Derivation:
    """L ends in a left rule; theta is its (parametric) succedent."""
    if L.eigen is not None and L.eigen in sequent_free_vars(R.conclusion):
        L = rename_eigen(L, sequent_free_vars(R.conclusion))
    new_prems = []
    for i, P in enumerate(L.premises):
        if L.rule == IMPL_L and i == 1:
            new_prems.append(P)  # the minor premise Gamma => alpha
        else:
            new_prems.append(_reduce_cut(P, R, theta))
    return _reapply(L, target, new_prems)


def _push_right(L: Derivation, R: Derivation, theta, target) -> Derivation:
    """theta is parametric in R's last rule: cut into R's premises."""
    if R.eigen is not None and R.eigen in sequent_free_vars(L.conclusion):
        R = rename_eigen(R, sequent_free_vars(L.conclusion))
    if not R.premises:
        raise ProofError(f"cannot push a cut past leaf rule {R.rule}")
    new_prems = []
    for P in R.premises:
        if theta in P.conclusion.ant:
            new_prems.append(_reduce_cut(L, P, theta))
        else:
            new_prems.append(P)
    return _reapply(R, target, new_prems)


def _principal_reduction(L: Derivation, R: Derivation, theta, target) -> Derivation:
    """theta introduced by L's last (right) rule and principal in R's left rule."""
    # first remove any residual copy of theta from R's premises
    def clean(P: Derivation) -> Derivation:
        if theta in P.conclusion.ant:
            return _reduce_cut(L, P, theta)
        return P

    if isinstance(theta, And):  # L: AndR, R: AndL
        P = clean(R.premises[0])  # ..., alpha, beta => psi (theta removed)
        L1, L2 = L.premises  # Gamma => alpha ; Gamma => beta
        step1 = _reduce_cut(L2, P, theta.right)
        step2 = _reduce_cut(L1, step1, theta.left)
        return weaken_to(step2, target)
    if isinstance(theta, Or):  # L: OrR projection, R: OrL
        P1, P2 = (clean(p) for p in R.premises)
        (proj,) = L.premises[0].conclusion.suc
        if proj == theta.left:
            out = _reduce_cut(L.premises[0], P1, theta.left)
        else:
            out = _reduce_cut(L.premises[0], P2, theta.right)
        return weaken_to(out, target)
    if isinstance(theta, Impl):  # L: ImplRp from Gamma => beta, R: ImplL
        P1 = clean(R.premises[0])  # Gamma1, beta => psi
        out = _reduce_cut(L.premises[0], P1, theta.right)
        return weaken_to(out, target)
    if isinstance(theta, Forall):  # L: ForallR, R: ForallL with witness u
        P = clean(R.premises[0])
        u = R.witness
        inst = substitute(theta.body, theta.var, u)
        Lp = L.premises[0]
        if not (u.kind == FREE and u.name == L.eigen):
            Lp = subst_free_in_derivation(Lp, L.eigen, u)
        out = _reduce_cut(Lp, P, inst)
        return weaken_to(out, target)
    if isinstance(theta, Exists):  # L: ExistsR with witness u, R: ExistsL
        P = clean(R.premises[0])
        u = L.witness
        inst = substitute(theta.body, theta.var, u)
        if not (u.kind == FREE and u.name == R.eigen):
            P = subst_free_in_derivation(P, R.eigen, u)
        out = _reduce_cut(L.premises[0], P, inst)
        return weaken_to(out, target)
    raise ProofError(f"no principal reduction for cut formula {fstr(theta)}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def derivation_to_dict(d: Derivation) -> dict:
    out: dict = {"rule": d.rule, "conclusion": str(d.conclusion)}
    if d.principal is not None:
        out["principal"] = fstr(d.principal)
    if d.witness is not None:
        out["witness"] = str(d.witness)
    if d.eigen is not None:
        out["eigenvariable"] = d.eigen
    out["premises"] = [derivation_to_dict(p) for p in d.premises]
    return out


def derivation_from_dict(data: dict) -> Derivation:
    from .syntax import parse_formula, parse_sequent, parse_term

    return Derivation(
        parse_sequent(data["conclusion"]),
        data["rule"],
        parse_formula(data["principal"]) if "principal" in data else None,
        parse_term(data["witness"]) if "witness" in data else None,
        data.get("eigenvariable"),
        tuple(derivation_from_dict(p) for p in data.get("premises", ())),
    )
