"""Cross-module properties on random propositional inputs."""

from hypothesis import given, settings, strategies as st

from primal.calculus import check_derivation
from primal.cli import extend_qb_model, gen_qb_model
from primal.prover import Budget, PROVED, REFUTED, prove
from primal.semantics import check_qb_valuation, sequent_valid_qb
from primal.syntax import And, Atom, Impl, Or, Sequent, TOP

atoms = st.sampled_from([Atom("p"), Atom("q"), Atom("r"), TOP])


def formulas(depth=2):
    return st.recursive(
        atoms,
        lambda kids: st.builds(And, kids, kids) | st.builds(Or, kids, kids)
        | st.builds(Impl, kids, kids),
        max_leaves=6)


sequents = st.builds(
    Sequent,
    st.frozensets(formulas(), max_size=3),
    st.frozensets(formulas(), min_size=1, max_size=2))


@settings(max_examples=60, deadline=None)
@given(sequents)
def test_proofs_check_and_refutations_have_models(s):
    v = prove(s, "GPM", Budget(max_steps=3000))
    if v.status == PROVED:
        assert check_derivation(v.derivation, "GPM", allow_cut=False).ok
        assert v.derivation.conclusion == s
    elif v.status == REFUTED:
        assert check_qb_valuation(v.model) == []
        assert not sequent_valid_qb(v.model, s)


@settings(max_examples=40, deadline=None)
@given(sequents, st.integers(0, 10_000))
def test_proved_sequents_valid_in_extended_models(s, seed):
    v = prove(s, "GPM", Budget(max_steps=3000))
    if v.status != PROVED:
        return
    m = gen_qb_model(seed, [("p", 0), ("q", 0)], 1 + seed % 2)
    extend_qb_model(m, s, seed)
    assert check_qb_valuation(m) == []
    assert sequent_valid_qb(m, s)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_generated_models_always_check(seed, size):
    m = gen_qb_model(seed, [("p", 0), ("q", 0), ("P", 1)], size)
    assert check_qb_valuation(m) == []
