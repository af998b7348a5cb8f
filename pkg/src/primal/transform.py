"""Proof translations between the natural deduction and Gentzen calculi.

Single-conclusion derivations embed into the multi-conclusion calculus
rule by rule.  The reverse direction folds the succedent into one
disjunction and threads it through the proof, paying with constant
domain instances (tagged leaf nodes) at each right universal rule and
a bounded number of cuts.  Natural deduction and the single-conclusion
calculus translate into each other with cuts standing in for the
elimination rules and transitivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .calculus import (
    AND_E1,
    AND_E2,
    AND_I,
    AND_L,
    AND_R,
    AXIOM,
    CD_AXIOM,
    CUT,
    Derivation,
    EXISTS_E,
    EXISTS_I,
    EXISTS_L,
    EXISTS_R,
    FORALL_E,
    FORALL_I,
    FORALL_L,
    FORALL_R,
    IMPL_E,
    IMPL_IW,
    IMPL_L,
    IMPL_RP,
    OR_E,
    OR_I1,
    OR_I2,
    OR_L,
    OR_R,
    ProofError,
    TOP_AXIOM,
    TRANS,
    WEAKENING,
    axiom,
    check_derivation,
    eliminate_cut,
    weaken_to,
)
from .syntax import (
    Forall,
    Formula,
    Or,
    Sequent,
    formula_key,
    free,
    sorted_formulas,
    substitute,
)


def or_fold(delta) -> Formula:
    """Right-nested disjunction of a formula set in canonical order."""
    members = sorted_formulas(delta)
    if not members:
        raise ProofError("cannot fold an empty succedent")
    out = members[-1]
    for f in reversed(members[:-1]):
        out = Or(f, out)
    return out


# ---------------------------------------------------------------------------
# Single-conclusion into multi-conclusion
# ---------------------------------------------------------------------------


def qgp_to_qgpm(d: Derivation) -> Derivation:
    """Embed a single-conclusion derivation into the multi-conclusion rules."""
    prems = tuple(qgp_to_qgpm(p) for p in d.premises)
    if d.rule == OR_R:
        # projection becomes Weakening plus the two-disjunct right rule
        (p,) = prems
        mid = Sequent.of(p.conclusion.ant,
                         {d.principal.left, d.principal.right})
        return Derivation(d.conclusion, OR_R, principal=d.principal,
                          premises=(weaken_to(p, mid),))
    if d.rule == IMPL_L:
        p1, p2 = prems
        (theta,) = d.conclusion.suc
        mid = Sequent.of(p2.conclusion.ant, {theta, d.principal.left})
        return Derivation(d.conclusion, IMPL_L, principal=d.principal,
                          premises=(p1, weaken_to(p2, mid)))
    return replace(d, premises=prems)


# ---------------------------------------------------------------------------
# QGPM -> QGP + (CD)
# ---------------------------------------------------------------------------


@dataclass
class TranslationReport:
    source: Derivation
    target: Derivation
    cd_instances: list[Sequent] = field(default_factory=list)
    cuts_introduced: int = 0


class _CdTranslator:
    def __init__(self):
        self.cd_instances: list[Sequent] = []
        self.cuts = 0

    def inject(self, d: Derivation, members: list[Formula]) -> Derivation:
        """d proves A => m with m in members; conclude A => fold(members)."""
        (cur,) = d.conclusion.suc
        if len(members) == 1:
            if cur != members[0]:
                raise ProofError("injection target mismatch")
            return d
        head, rest = members[0], members[1:]
        goal = Or(head, or_fold(rest))
        if cur != head:
            d = self.inject(d, rest)
        return Derivation(Sequent.of(d.conclusion.ant, [goal]), OR_R,
                          principal=goal, premises=(d,))

    def inj_leaf(self, members):
        return lambda m: self.inject(axiom(m), members)

    def by_cases(self, members, base, theta, leaf) -> Derivation:
        """Conclude base, fold(members) => theta from per-member proofs."""
        f = or_fold(members)
        G = frozenset(base) | {f}
        if len(members) == 1:
            return weaken_to(leaf(members[0]),
                             Sequent.of(G | {members[0]}, [theta]))
        head, rest = members[0], members[1:]
        d1 = weaken_to(leaf(head), Sequent.of(G | {head}, [theta]))
        d2 = self.by_cases(rest, base, theta, leaf)
        d2 = weaken_to(d2, Sequent.of(G | {or_fold(rest)}, [theta]))
        return Derivation(Sequent.of(G, [theta]), OR_L, principal=f,
                          premises=(d1, d2))

    def cut_cases(self, q: Derivation, members, theta, leaf) -> Derivation:
        """q proves base => fold(members); case split to base => theta."""
        base = q.conclusion.ant
        bridge = self.by_cases(members, base, theta, leaf)
        self.cuts += 1
        return Derivation(Sequent.of(base, [theta]), CUT,
                          principal=or_fold(members), premises=(q, bridge))

    def run(self, n: Derivation) -> Derivation:
        G, D = n.conclusion.ant, n.conclusion.suc
        if not D:
            raise ProofError("translation needs a non-empty succedent")
        Ds = sorted_formulas(D)
        delta = or_fold(Ds)
        target = Sequent.of(G, [delta])
        pr = n.principal

        if n.rule in (AXIOM, TOP_AXIOM, CD_AXIOM):
            return Derivation(target, n.rule)
        if n.rule in (AND_L, OR_L, FORALL_L, EXISTS_L):
            return Derivation(target, n.rule, principal=pr, witness=n.witness,
                              eigen=n.eigen,
                              premises=tuple(self.run(p) for p in n.premises))
        if n.rule == WEAKENING:
            q = self.run(n.premises[0])
            sub = n.premises[0].conclusion.suc
            q = weaken_to(q, Sequent.of(G, [or_fold(sub)]))
            if sub == D:
                return q
            return self.cut_cases(q, sorted_formulas(sub), delta,
                                  self.inj_leaf(Ds))
        if n.rule == AND_R:
            p1, p2 = n.premises
            q1, q2 = self.run(p1), self.run(p2)
            s1 = sorted_formulas(p1.conclusion.suc)
            s2 = sorted_formulas(p2.conclusion.suc)

            def leaf1(m):
                if m != pr.left:
                    return self.inj_leaf(Ds)(m)
                inner = G | {pr.left}
                q2w = weaken_to(q2, Sequent.of(inner, [or_fold(s2)]))

                def leaf2(m2):
                    if m2 != pr.right:
                        return self.inj_leaf(Ds)(m2)
                    A = inner | {pr.right}
                    both = Derivation(
                        Sequent.of(A, [pr]), AND_R, principal=pr,
                        premises=(
                            weaken_to(axiom(pr.left), Sequent.of(A, [pr.left])),
                            weaken_to(axiom(pr.right), Sequent.of(A, [pr.right])),
                        ))
                    return self.inject(both, Ds)

                return self.cut_cases(q2w, s2, delta, leaf2)

            return self.cut_cases(q1, s1, delta, leaf1)
        if n.rule in (OR_R, IMPL_RP, EXISTS_R):
            (p,) = n.premises
            q = self.run(p)
            s = sorted_formulas(p.conclusion.suc)
            if n.rule == OR_R:
                fresh = {pr.left, pr.right}
            elif n.rule == IMPL_RP:
                fresh = {pr.right}
            else:
                fresh = {substitute(pr.body, pr.var, n.witness)}

            def leaf(m):
                if m not in fresh:
                    return self.inj_leaf(Ds)(m)
                d = axiom(m)
                node = Derivation(Sequent.of({m}, [pr]), n.rule, principal=pr,
                                  witness=n.witness, premises=(d,))
                return self.inject(node, Ds)

            return self.cut_cases(q, s, delta, leaf)
        if n.rule == FORALL_R:
            (p,) = n.premises
            q = self.run(p)
            a = n.eigen
            phi_a = substitute(pr.body, pr.var, free(a))
            s = sorted_formulas(p.conclusion.suc)
            rest = [f for f in s if f != phi_a]
            if not rest:
                node = Derivation(Sequent.of(G, [pr]), FORALL_R, principal=pr,
                                  eigen=a, premises=(q,))
                return self.inject(node, Ds)
            delta2 = or_fold(rest)
            th = Or(delta2, phi_a)

            def leaf_th(m):
                if m == phi_a:
                    return Derivation(Sequent.of({m}, [th]), OR_R,
                                      principal=th, premises=(axiom(m),))
                d = self.inject(axiom(m), rest)
                return Derivation(Sequent.of({m}, [th]), OR_R, principal=th,
                                  premises=(d,))

            q2 = self.cut_cases(q, s, th, leaf_th)
            g = Forall(pr.var, Or(delta2, pr.body))
            q3 = Derivation(Sequent.of(G, [g]), FORALL_R, principal=g,
                            eigen=a, premises=(q2,))
            cd = Derivation(Sequent.of([g], [Or(delta2, pr)]), CD_AXIOM)
            self.cd_instances.append(cd.conclusion)
            self.cuts += 1
            q4 = Derivation(Sequent.of(G, [Or(delta2, pr)]), CUT, principal=g,
                            premises=(q3, cd))
            f = Or(delta2, pr)
            d1 = self.by_cases(rest, G, delta, self.inj_leaf(Ds))
            d1 = weaken_to(d1, Sequent.of(G | {f, delta2}, [delta]))
            d2 = weaken_to(self.inject(axiom(pr), Ds),
                           Sequent.of(G | {f, pr}, [delta]))
            orl = Derivation(Sequent.of(G | {f}, [delta]), OR_L, principal=f,
                             premises=(d1, d2))
            self.cuts += 1
            return Derivation(target, CUT, principal=f, premises=(q4, orl))
        if n.rule == IMPL_L:
            p1, p2 = n.premises
            q1, q2 = self.run(p1), self.run(p2)
            s2 = sorted_formulas(p2.conclusion.suc)
            q2 = weaken_to(q2, Sequent.of(G, [or_fold(s2)]))

            def leaf(m):
                if m != pr.left:
                    return self.inj_leaf(Ds)(m)
                A = G | {pr.left}
                b1 = weaken_to(q1, Sequent.of(A | {pr.right}, [delta]))
                b2 = weaken_to(axiom(pr.left), Sequent.of(A, [pr.left]))
                return Derivation(Sequent.of(A, [delta]), IMPL_L, principal=pr,
                                  premises=(b1, b2))

            return self.cut_cases(q2, s2, delta, leaf)
        if n.rule == CUT:
            theta = pr
            p1, p2 = n.premises
            q1 = weaken_to(self.run(p1),
                           Sequent.of(G, [or_fold(p1.conclusion.suc)]))
            q2 = self.run(p2)
            s1 = sorted_formulas(p1.conclusion.suc)
            s2 = p2.conclusion.suc

            def leaf(m):
                if m != theta:
                    return self.inj_leaf(Ds)(m)
                qq = weaken_to(q2, Sequent.of(G | {theta}, [or_fold(s2)]))
                if s2 == D:
                    return qq
                return self.cut_cases(qq, sorted_formulas(s2), delta,
                                      self.inj_leaf(Ds))

            return self.cut_cases(q1, s1, delta, leaf)
        raise ProofError(f"cannot translate rule {n.rule}")


def qgpm_to_qgp_cd(d: Derivation) -> TranslationReport:
    res = check_derivation(d, "QGPM", allow_cd=True)
    if not res.ok:
        raise ProofError(f"input is not a QGPM derivation: {res.reason}")
    tr = _CdTranslator()
    target = tr.run(d)
    return TranslationReport(d, target, tr.cd_instances, tr.cuts)


# ---------------------------------------------------------------------------
# Natural deduction <-> single-conclusion Gentzen
# ---------------------------------------------------------------------------


def nd_to_gentzen(d: Derivation) -> Derivation:
    res = check_derivation(d, "QP")
    if not res.ok:
        raise ProofError(f"input is not a natural deduction proof: {res.reason}")
    return eliminate_cut(_nd_to_gentzen(d))


def _cut(left: Derivation, right: Derivation, theta: Formula,
         target: Sequent) -> Derivation:
    concl = Sequent.of(left.conclusion.ant | (right.conclusion.ant - {theta}),
                       right.conclusion.suc)
    node = Derivation(concl, CUT, principal=theta, premises=(left, right))
    return weaken_to(node, target)


def _nd_to_gentzen(d: Derivation) -> Derivation:
    seq = d.conclusion
    G = seq.ant
    (phi,) = seq.suc
    prems = tuple(_nd_to_gentzen(p) for p in d.premises)
    pr = d.principal
    direct = {AND_I: AND_R, OR_I1: OR_R, OR_I2: OR_R, IMPL_IW: IMPL_RP,
              FORALL_I: FORALL_R, EXISTS_I: EXISTS_R}
    if d.rule in (AXIOM, TOP_AXIOM, WEAKENING):
        return replace(d, premises=prems)
    if d.rule in direct:
        principal = pr if pr is not None else phi
        return Derivation(seq, direct[d.rule], principal=phi,
                          witness=d.witness, eigen=d.eigen, premises=prems)
    if d.rule == TRANS:
        return _cut(prems[0], prems[1], pr, seq)
    if d.rule in (AND_E1, AND_E2):
        inst = pr.left if d.rule == AND_E1 else pr.right
        body = weaken_to(axiom(inst),
                         Sequent.of({pr.left, pr.right}, [inst]))
        left_rule = Derivation(Sequent.of({pr}, [inst]), AND_L, principal=pr,
                               premises=(body,))
        return _cut(prems[0], left_rule, pr, seq)
    if d.rule == OR_E:
        p1, p2, p3 = prems
        orl = Derivation(Sequent.of(G | {pr}, [phi]), OR_L, principal=pr,
                         premises=(weaken_to(p1, Sequent.of(G | {pr, pr.left}, [phi])),
                                   weaken_to(p2, Sequent.of(G | {pr, pr.right}, [phi]))))
        return _cut(p3, orl, pr, seq)
    if d.rule == IMPL_E:
        p1, p2 = prems
        A = G | {pr}
        impl = Derivation(
            Sequent.of(A, [pr.right]), IMPL_L, principal=pr,
            premises=(weaken_to(axiom(pr.right), Sequent.of(A | {pr.right}, [pr.right])),
                      weaken_to(p1, Sequent.of(A, [pr.left]))))
        return _cut(p2, impl, pr, seq)
    if d.rule == FORALL_E:
        inst = substitute(pr.body, pr.var, d.witness)
        node = Derivation(Sequent.of({pr}, [inst]), FORALL_L, principal=pr,
                          witness=d.witness, premises=(axiom(inst),))
        return _cut(prems[0], node, pr, seq)
    if d.rule == EXISTS_E:
        p1, p2 = prems
        inst = substitute(pr.body, pr.var, free(d.eigen))
        base = (p2.conclusion.ant - {inst}) | {pr}
        node = Derivation(Sequent.of(base, [phi]), EXISTS_L, principal=pr,
                          eigen=d.eigen, premises=(p2,))
        return _cut(p1, node, pr, seq)
    raise ProofError(f"cannot translate rule {d.rule}")


def gentzen_to_nd(d: Derivation) -> Derivation:
    if d.count_rule(CUT):
        raise ProofError("run cut elimination before translating to "
                         "natural deduction")
    res = check_derivation(d, "QGP", allow_cut=False)
    if not res.ok:
        raise ProofError(f"input is not a cut-free QGP derivation: {res.reason}")
    return _gentzen_to_nd(d)


def _trans(first: Derivation, second: Derivation, mid: Formula,
           target: Sequent) -> Derivation:
    G = first.conclusion.ant
    second = weaken_to(second, Sequent.of(G | {mid}, target.suc))
    node = Derivation(Sequent.of(G, target.suc), TRANS, principal=mid,
                      premises=(first, second))
    return weaken_to(node, target)


def _hyp(f: Formula, ant) -> Derivation:
    return weaken_to(axiom(f), Sequent.of(frozenset(ant) | {f}, [f]))


def _gentzen_to_nd(d: Derivation) -> Derivation:
    seq = d.conclusion
    G = seq.ant
    (phi,) = seq.suc
    prems = tuple(_gentzen_to_nd(p) for p in d.premises)
    pr = d.principal
    direct = {AND_R: AND_I, IMPL_RP: IMPL_IW, FORALL_R: FORALL_I,
              EXISTS_R: EXISTS_I}
    if d.rule in (AXIOM, TOP_AXIOM, WEAKENING):
        return replace(d, premises=prems)
    if d.rule in direct:
        return Derivation(seq, direct[d.rule], witness=d.witness,
                          eigen=d.eigen, premises=prems)
    if d.rule == OR_R:
        (p,) = prems
        (got,) = p.conclusion.suc
        rule = OR_I1 if got == pr.left else OR_I2
        return Derivation(seq, rule, premises=prems)
    if d.rule == AND_L:
        l, r = pr.left, pr.right
        e_l = Derivation(Sequent.of(G, [l]), AND_E1, principal=pr,
                         premises=(_hyp(pr, G),))
        e_r = Derivation(Sequent.of(G | {l}, [r]), AND_E2, principal=pr,
                         premises=(_hyp(pr, G | {l}),))
        inner = _trans(e_r, prems[0], r, Sequent.of(G | {l}, [phi]))
        return _trans(e_l, inner, l, seq)
    if d.rule == OR_L:
        p1, p2 = prems
        return Derivation(
            seq, OR_E, principal=pr,
            premises=(weaken_to(p1, Sequent.of(G | {pr.left}, [phi])),
                      weaken_to(p2, Sequent.of(G | {pr.right}, [phi])),
                      _hyp(pr, G)))
    if d.rule == IMPL_L:
        p1, p2 = prems
        e = Derivation(Sequent.of(G, [pr.right]), IMPL_E, principal=pr,
                       premises=(weaken_to(p2, Sequent.of(G, [pr.left])),
                                 _hyp(pr, G)))
        return _trans(e, p1, pr.right, seq)
    if d.rule == FORALL_L:
        inst = substitute(pr.body, pr.var, d.witness)
        e = Derivation(Sequent.of(G, [inst]), FORALL_E, principal=pr,
                       witness=d.witness, premises=(_hyp(pr, G),))
        return _trans(e, prems[0], inst, seq)
    if d.rule == EXISTS_L:
        (p,) = prems
        inst = substitute(pr.body, pr.var, free(d.eigen))
        concl = Sequent.of({pr} | (p.conclusion.ant - {inst}), [phi])
        node = Derivation(concl, EXISTS_E, principal=pr, eigen=d.eigen,
                          premises=(axiom(pr), p))
        return weaken_to(node, seq)
    raise ProofError(f"cannot translate rule {d.rule}")
