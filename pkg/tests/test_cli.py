import io
import json
import os

import pytest

from primal.calculus import ProofError
from primal.cli import (
    CorpusError,
    build_dp_model,
    dp_split,
    extend_qb_model,
    gen_kripke_model,
    gen_qb_model,
    main,
    run_corpus,
)
from primal.prover import Budget
from primal.semantics import (
    check_kripke_model,
    check_qb_valuation,
    eval_qb,
    sequent_valid_qb,
    serialize_model,
)
from primal.syntax import Atom, parse_formula, parse_sequent

DATA = os.path.join(os.path.dirname(__file__), "data")
SIG = [("p", 0), ("q", 0), ("P", 1)]


def f(text):
    return parse_formula(text)


class TestDpModel:
    def test_trivial_atoms(self):
        m = build_dp_model({f("p")}, f("p"), f("q"))
        assert m.domain == ("a",)
        assert m.valuation[Atom("p")] == 1
        assert m.valuation[Atom("q")] == 0
        assert not m.partial

    def test_empty_gamma(self):
        m = build_dp_model(set(), f("p"), f("q"))
        assert all(v == 0 for k, v in m.valuation.items()
                   if isinstance(k, Atom))

    def test_constant_domain(self):
        m = build_dp_model({f("P(c1)")}, f("exists x. P(x)"), f("q"))
        assert set(m.domain) == {"c1", "a"}
        assert eval_qb(m, f("P(c1)"))
        assert not eval_qb(m, f("P(a)"), {})

    def test_rejects_non_harrop(self):
        with pytest.raises(ProofError):
            build_dp_model({f("p | q")}, f("p"), f("q"))

    def test_valuation_is_quasi_boolean(self):
        m = build_dp_model({f("p -> q"), f("p")}, f("q"), f("r"))
        assert check_qb_valuation(m) == []


class TestDpSplit:
    def test_left(self):
        rep = dp_split({f("p -> q"), f("p")}, f("q"), f("r"))
        assert rep.chosen == "left"
        assert rep.verdicts["or"] == "proved"

    def test_right(self):
        rep = dp_split({f("q")}, f("p"), f("q"))
        assert rep.chosen == "right"

    def test_symmetric(self):
        assert dp_split({f("p")}, f("p"), f("p")).chosen == "left"

    def test_neither_when_unprovable(self):
        rep = dp_split({f("p")}, f("q"), f("r"))
        assert rep.chosen == "neither"
        assert rep.verdicts["or"] == "refuted"

    def test_non_harrop_flagged(self):
        rep = dp_split({f("p | q")}, f("p"), f("q"))
        assert rep.chosen == "non-harrop"
        assert rep.model is None

    def test_model_validates_gamma(self):
        rep = dp_split({f("p"), f("p -> q")}, f("q"), f("r"))
        for g in rep.gamma:
            assert eval_qb(rep.model, g)


class TestGenerators:
    def test_qb_models_pass_checker(self):
        for s in range(60):
            m = gen_qb_model(s, SIG, 1 + s % 3)
            assert check_qb_valuation(m) == [], s

    def test_kripke_models_pass_checker(self):
        for s in range(40):
            m = gen_kripke_model(s, SIG, 1 + s % 4)
            assert check_kripke_model(m) == [], s

    def test_seed_determinism(self):
        a = serialize_model(gen_qb_model(11, SIG, 2))
        b = serialize_model(gen_qb_model(11, SIG, 2))
        assert a == b
        c = serialize_model(gen_kripke_model(11, SIG, 3))
        d = serialize_model(gen_kripke_model(11, SIG, 3))
        assert c == d

    def test_extend_keeps_model_clean(self):
        s = parse_sequent("a1 -> b1, b1 -> c1q => a1 -> c1q")
        for seed in range(20):
            m = gen_qb_model(seed, SIG, 2)
            extend_qb_model(m, s, seed)
            assert check_qb_valuation(m) == [], seed
            sequent_valid_qb(m, s)  # all keys present


class TestCorpusRunner:
    def test_data_files(self):
        for name, calc in [("provable_qgp.txt", "QGP"),
                           ("provable_qgpm.txt", "QGPM"),
                           ("unprovable.txt", "QGPM")]:
            summary = run_corpus(os.path.join(DATA, name), calc)
            assert summary.failed == 0, (name, summary.mismatches[:3])

    def test_mismatch_reported(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("EXPECT refuted p => p\n")
        summary = run_corpus(str(p), "QGPM")
        assert summary.failed == 1
        assert summary.mismatches[0][:3] == (1, "refuted", "proved")

    def test_format_error(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("EXPECT maybe p => p\n")
        with pytest.raises(CorpusError, match="line 1"):
            run_corpus(str(p), "QGPM")


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestMain:
    def test_parse(self):
        code, out, _ = run_cli("parse", "q,p=>r")
        assert code == 0
        assert out == "p, q => r\n"

    def test_prove_exit_codes(self):
        assert run_cli("prove", "p => p", "--calculus", "qgpm")[0] == 0
        assert run_cli("prove", "=> p -> p", "--calculus", "qgpm")[0] == 1

    def test_prove_emits_artifacts(self, tmp_path):
        proof = tmp_path / "p.json"
        code, out, _ = run_cli("prove", "p & q => q", "--calculus", "qgp",
                               "--emit-proof", str(proof))
        assert code == 0 and out.startswith("proved")
        code, out, _ = run_cli("check-proof", str(proof), "--calculus", "qgp")
        assert code == 0 and out == "ok\n"

    def test_countermodel_round_trip(self, tmp_path):
        model = tmp_path / "m.txt"
        code, _, _ = run_cli("prove", "p => q", "--calculus", "qgpm",
                             "--emit-countermodel", str(model))
        assert code == 1
        assert run_cli("check-model", str(model))[0] == 0
        code, out, _ = run_cli("eval", "--model", str(model),
                               "--sequent", "p => q")
        assert code == 1 and out == "invalid\n"

    def test_translate_round_trip(self, tmp_path):
        proof = tmp_path / "p.json"
        run_cli("prove", "p | q => q | p", "--calculus", "qgp",
                "--emit-proof", str(proof))
        nd = tmp_path / "nd.json"
        assert run_cli("translate", "--from", "qgp", "--to", "qp",
                       "--proof", str(proof), "-o", str(nd))[0] == 0
        assert run_cli("check-proof", str(nd), "--calculus", "qp")[0] == 0

    def test_translate_emits_cd_report(self, tmp_path):
        proof = tmp_path / "cd.json"
        run_cli("prove", "forall x.(A | B(x)) => A | forall x. B(x)",
                "--calculus", "qgpm", "--emit-proof", str(proof))
        code, out, _ = run_cli("translate", "--from", "qgpm", "--to", "qgp",
                               "--proof", str(proof))
        assert code == 0
        rep = json.loads(out)
        assert rep["cd_instances"]
        assert rep["cuts_introduced"] >= 1

    def test_dp_check(self):
        code, out, _ = run_cli("dp-check", "--gamma", "p -> q; p",
                               "--alpha", "q", "--beta", "r")
        assert code == 0
        assert "chosen: left" in out

    def test_corpus_exit_codes(self, tmp_path):
        good = os.path.join(DATA, "provable_qgpm.txt")
        assert run_cli("corpus", good, "--calculus", "qgpm")[0] == 0
        bad = tmp_path / "bad.txt"
        bad.write_text("EXPECT proved => p -> p\n")
        assert run_cli("corpus", str(bad), "--calculus", "qgpm")[0] == 1

    def test_usage_and_format_errors(self):
        assert run_cli("prove", "not a sequent")[0] == 3
        with pytest.raises(SystemExit) as e:
            run_cli("prove", "p => p", "--calculus", "nope")
        assert e.value.code == 3

    def test_byte_determinism(self):
        for argv in (["prove", "p -> q => q, r", "--calculus", "qgpm"],
                     ["gen-model", "--seed", "3", "--kind", "kripke",
                      "--worlds", "3"],
                     ["dp-check", "--gamma", "q", "--alpha", "p",
                      "--beta", "q"]):
            assert run_cli(*argv) == run_cli(*argv)
