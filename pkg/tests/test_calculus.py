import pytest

from primal.calculus import (
    AND_L,
    AND_R,
    AXIOM,
    CUT,
    CD_AXIOM,
    Derivation,
    FORALL_L,
    FORALL_R,
    IMPL_L,
    IMPL_RP,
    OR_L,
    OR_R,
    TOP_AXIOM,
    WEAKENING,
    axiom,
    check_derivation,
    check_inference,
    derivation_from_dict,
    derivation_to_dict,
    eliminate_cut,
    top_axiom,
    weaken_to,
)
from primal.syntax import (
    And,
    Atom,
    Forall,
    Impl,
    Or,
    Sequent,
    TOP,
    bound,
    free,
    parse_formula,
    parse_sequent,
)

A = Atom("A")
p = Atom("p")
q = Atom("q")
Bx = Atom("B", (bound("x"),))
Ba = Atom("B", (free("a"),))
CD_ANT = Forall("x", Or(A, Bx))
CD_SUC = Or(A, Forall("x", Bx))


def seq(text):
    return parse_sequent(text)


class TestInference:
    def test_impl_rp_multi(self):
        ok = check_inference(
            seq("G => p -> q, r"), [seq("G => q, r")], IMPL_RP,
            principal=Impl(p, q), calc="QGPM",
        )
        assert ok

    def test_impl_rp_wrong_side(self):
        # primal implication keeps the consequent, not the antecedent
        ok = check_inference(
            seq("=> p -> q"), [seq("=> p")], IMPL_RP,
            principal=Impl(p, q), calc="QGPM",
        )
        assert not ok

    def test_top_axiom(self):
        assert check_inference(seq("=> T"), [], TOP_AXIOM, calc="QGPM")

    def test_forall_l_cd_step(self):
        concl = Sequent.of([CD_ANT], [A, Ba])
        prem = Sequent.of([Or(A, Ba)], [A, Ba])
        assert check_inference(concl, [prem], FORALL_L,
                               principal=CD_ANT, witness=free("a"),
                               calc="QGPM")

    def test_eigenvariable_violation(self):
        # a occurs free in the conclusion context
        concl = Sequent.of([Ba], [Forall("x", Bx)])
        prem = Sequent.of([Ba], [Ba])
        assert not check_inference(concl, [prem], FORALL_R,
                                   principal=Forall("x", Bx), eigen="a",
                                   calc="QGP")

    def test_or_projection_single(self):
        concl = seq("G => p | q")
        assert check_inference(concl, [seq("G => p")], OR_R,
                               principal=Or(p, q), calc="QGP")
        assert check_inference(concl, [seq("G => q")], OR_R,
                               principal=Or(p, q), calc="QGP")

    def test_or_l_rejected_in_weak_calculi(self):
        concl = seq("p | q => p")
        prems = [seq("p => p"), seq("q => p")]
        assert check_inference(concl, prems, OR_L, principal=Or(p, q),
                               calc="QGP")
        assert not check_inference(concl, prems, OR_L, principal=Or(p, q),
                                   calc="QGPW")

    def test_propositional_rejects_quantifiers(self):
        concl = Sequent.of([CD_ANT], [CD_SUC])
        assert not check_inference(concl, [], AXIOM, calc="GP")

    def test_cd_axiom_mode(self):
        concl = Sequent.of([CD_ANT], [CD_SUC])
        assert check_inference(concl, [], CD_AXIOM, calc="QGP", allow_cd=True)
        assert not check_inference(concl, [], CD_AXIOM, calc="QGP")

    def test_cd_axiom_shape_rejects_bound_in_a(self):
        bad_ant = Forall("x", Or(Bx, Bx))
        concl = Sequent.of([bad_ant], [Or(Bx, Forall("x", Bx))])
        assert not check_inference(concl, [], CD_AXIOM, calc="QGP",
                                   allow_cd=True)


def explicit_cd_derivation() -> Derivation:
    """The explicit QGPM derivation of the constant domain principle."""
    n1 = axiom(A)
    n2 = weaken_to(n1, Sequent.of([A], [A, Ba]))
    n3 = axiom(Ba)
    n4 = weaken_to(n3, Sequent.of([Ba], [A, Ba]))
    n5 = Derivation(Sequent.of([Or(A, Ba)], [A, Ba]), OR_L,
                    principal=Or(A, Ba), premises=(n2, n4))
    n6 = Derivation(Sequent.of([CD_ANT], [A, Ba]), FORALL_L,
                    principal=CD_ANT, witness=free("a"), premises=(n5,))
    n7 = Derivation(Sequent.of([CD_ANT], [A, Forall("x", Bx)]), FORALL_R,
                    principal=Forall("x", Bx), eigen="a", premises=(n6,))
    n8 = Derivation(Sequent.of([CD_ANT], [CD_SUC]), OR_R,
                    principal=CD_SUC, premises=(n7,))
    return n8


class TestCheckDerivation:
    def test_explicit_cd_derivation(self):
        d = explicit_cd_derivation()
        res = check_derivation(d, "QGPM", allow_cut=False)
        assert res.ok, (res.path, res.reason)

    def test_single_axiom(self):
        assert check_derivation(axiom(p), "QGP", allow_cut=False).ok

    def test_impl_rp_principal_mismatch(self):
        bad = Derivation(seq("=> p -> q"), IMPL_RP, principal=Impl(p, q),
                         premises=(axiom(p),))
        res = check_derivation(bad, "QGPM")
        assert not res.ok
        assert res.path == ()

    def test_cut_free_implies_cut_allowed(self):
        d = explicit_cd_derivation()
        assert check_derivation(d, "QGPM", allow_cut=True).ok

    def test_failure_path_reported(self):
        bad_leaf = Derivation(seq("p => q"), AXIOM)
        d = Derivation(seq("p => q | q"), OR_R, principal=Or(q, q),
                       premises=(bad_leaf,))
        res = check_derivation(d, "QGP")
        assert not res.ok and res.path == (0,)


def direct_and_swap() -> Derivation:
    """Cut-free QGP proof of p & q => q & p."""
    pq = And(p, q)
    ctx = [p, q, pq]
    dq = weaken_to(axiom(q), Sequent.of(ctx, [q]))
    dp = weaken_to(axiom(p), Sequent.of(ctx, [p]))
    andr = Derivation(Sequent.of(ctx, [And(q, p)]), AND_R,
                      principal=And(q, p), premises=(dq, dp))
    return Derivation(Sequent.of([pq], [And(q, p)]), AND_L,
                      principal=pq, premises=(andr,))


class TestCutElimination:
    def test_cut_free_unchanged(self):
        d = direct_and_swap()
        assert eliminate_cut(d) == d

    def test_cut_with_axiom(self):
        d = direct_and_swap()
        qp = And(q, p)
        cut = Derivation(d.conclusion, CUT, principal=qp,
                         premises=(d, axiom(qp)))
        out = eliminate_cut(cut)
        assert out.conclusion == cut.conclusion
        assert out.count_rule(CUT) == 0
        assert check_derivation(out, "QGP", allow_cut=False).ok

    def test_primal_implication_configuration(self):
        # cut formula a -> b introduced by ImplRp against ImplL
        a, b = Atom("a_p"), Atom("b_p")
        ab = Impl(a, b)
        L = Derivation(Sequent.of([b], [ab]), IMPL_RP, principal=ab,
                       premises=(axiom(b),))
        r1 = weaken_to(axiom(b), Sequent.of([a, b], [b]))
        r2 = axiom(a)
        R = Derivation(Sequent.of([a, ab], [b]), IMPL_L, principal=ab,
                       premises=(r1, r2))
        cut = Derivation(Sequent.of([a, b], [b]), CUT, principal=ab,
                         premises=(L, R))
        assert check_derivation(cut, "QGP", allow_cut=True).ok
        out = eliminate_cut(cut)
        assert out.conclusion == cut.conclusion
        assert out.count_rule(CUT) == 0
        assert check_derivation(out, "QGP", allow_cut=False).ok

    def test_quantifier_cut(self):
        # cut on forall x. B(x): ForallR meets ForallL
        fx = Forall("x", Bx)
        Bb = Atom("B", (free("b"),))
        gamma = Forall("y", Atom("B", (bound("y"),)))
        inner = Derivation(Sequent.of([gamma], [Ba]), FORALL_L,
                           principal=gamma, witness=free("a"),
                           premises=(weaken_to(axiom(Ba), Sequent.of([Ba, gamma], [Ba])),))
        L = Derivation(Sequent.of([gamma], [fx]), FORALL_R, principal=fx,
                       eigen="a", premises=(inner,))
        rp = weaken_to(axiom(Bb), Sequent.of([Bb, fx], [Bb]))
        R = Derivation(Sequent.of([fx], [Bb]), FORALL_L, principal=fx,
                       witness=free("b"), premises=(rp,))
        cut = Derivation(Sequent.of([gamma], [Bb]), CUT, principal=fx,
                         premises=(L, R))
        assert check_derivation(cut, "QGP", allow_cut=True).ok
        out = eliminate_cut(cut)
        assert out.conclusion == cut.conclusion
        assert out.count_rule(CUT) == 0
        assert check_derivation(out, "QGP", allow_cut=False).ok


class TestSerialization:
    def test_roundtrip(self):
        d = explicit_cd_derivation()
        data = derivation_to_dict(d)
        assert derivation_from_dict(data) == d
