"""Command line surface, corpus runner, model generators, DP harness.

The disjunction property harness builds the derivability-driven
quasi-boolean model for a Harrop antecedent set: atoms are true iff the
prover derives them, implications additionally require the usual
closure condition, computed bottom-up in complexity order.  Oracle
calls that hit the budget poison the model (marked partial) instead of
defaulting to false.

Exit codes: 0 proved/valid/pass, 1 refuted/invalid/fail, 2 unknown,
3 usage or format error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from dataclasses import dataclass, field

from .calculus import (
    CALCULI,
    CUT,
    Derivation,
    ProofError,
    check_derivation,
    derivation_from_dict,
    derivation_to_dict,
    eliminate_cut,
)
from .prover import Budget, PROVED, REFUTED, UNKNOWN, prove
from .semantics import (
    KripkeModel,
    ModelError,
    QuasiBooleanModel,
    _force_kripke,
    _force_qb,
    check_kripke_model,
    check_qb_valuation,
    closure,
    elem,
    instance_keys,
    parse_model,
    to_key,
    sequent_valid_kripke,
    sequent_valid_qb,
    serialize_model,
)
from .syntax import (
    And,
    Atom,
    CONST,
    FREE,
    Formula,
    Impl,
    Or,
    ParseError,
    Sequent,
    TOP,
    Term,
    complexity,
    constants,
    free_vars,
    fstr,
    is_harrop,
    parse_formula,
    parse_sequent,
    sequent_names,
)
from .transform import gentzen_to_nd, nd_to_gentzen, qgp_to_qgpm, qgpm_to_qgp_cd


# ---------------------------------------------------------------------------
# Disjunction property harness
# ---------------------------------------------------------------------------


@dataclass
class DPReport:
    gamma: frozenset[Formula]
    alpha: Formula
    beta: Formula
    chosen: str  # left | right | neither | non-harrop
    model: QuasiBooleanModel | None
    verdicts: dict[str, str] = field(default_factory=dict)


def _unkey(f: Formula, const_names: set[str]) -> Formula:
    """Turn domain-element variables that name constants back into constants."""
    def conv(t: Term) -> Term:
        if t.kind == FREE and t.name in const_names:
            return Term(CONST, t.name)
        return t

    match f:
        case Atom(pred, args):
            return Atom(pred, tuple(conv(a) for a in args))
        case Impl(l, r):
            return Impl(_unkey(l, const_names), _unkey(r, const_names))
    return f


def build_dp_model(gamma, alpha: Formula, beta: Formula,
                   calculus_name: str = "QGPM",
                   budget: Budget | None = None) -> QuasiBooleanModel:
    gamma = frozenset(gamma)
    if calculus_name not in ("QGP", "QGPM"):
        raise ProofError("the construction targets QGP or QGPM")
    bad = [f for f in gamma if not is_harrop(f)]
    if bad:
        raise ProofError(f"antecedent member is not Harrop: {fstr(bad[0])}")
    budget = budget or Budget()

    shape = Sequent.of(gamma, [alpha, beta])
    used = sequent_names(shape)
    consts = sorted(c for f in gamma | {alpha, beta} for c in constants(f))
    fresh = "a"
    i = 0
    while fresh in used:
        fresh = f"a{i}"
        i += 1
    domain = tuple(dict.fromkeys(consts)) + (fresh,)
    const_interp = {c: c for c in dict.fromkeys(consts)}

    keys: set[Formula] = set()
    for f in gamma | {alpha, beta}:
        keys |= instance_keys(f, domain, const_interp)
    m = QuasiBooleanModel(domain, const_interp, {})
    const_names = set(const_interp)

    def oracle(k: Formula) -> str:
        goal = Sequent.of(gamma, [_unkey(k, const_names)])
        return prove(goal, calculus_name, budget).status

    atoms = sorted((k for k in keys if isinstance(k, Atom)), key=fstr)
    impls = sorted((k for k in keys if isinstance(k, Impl)),
                   key=lambda k: (complexity(k), fstr(k)))
    for k in atoms:
        st = oracle(k)
        if st == UNKNOWN:
            m.partial = True
        m.valuation[k] = 1 if st == PROVED else 0
    for k in impls:
        st = oracle(k)
        if st == UNKNOWN:
            m.partial = True
        closure_ok = (not _force_qb(m, k.left)) or _force_qb(m, k.right)
        m.valuation[k] = 1 if st == PROVED and closure_ok else 0
    return m


def dp_split(gamma, alpha: Formula, beta: Formula,
             calculus_name: str = "QGPM",
             budget: Budget | None = None) -> DPReport:
    gamma = frozenset(gamma)
    budget = budget or Budget()
    if any(not is_harrop(f) for f in gamma):
        return DPReport(gamma, alpha, beta, "non-harrop", None)
    verdicts = {
        "or": prove(Sequent.of(gamma, [Or(alpha, beta)]),
                    calculus_name, budget).status,
        "left": prove(Sequent.of(gamma, [alpha]), calculus_name, budget).status,
        "right": prove(Sequent.of(gamma, [beta]), calculus_name, budget).status,
    }
    model = build_dp_model(gamma, alpha, beta, calculus_name, budget)
    if verdicts["or"] != PROVED:
        chosen = "neither"
    elif verdicts["left"] == PROVED:
        chosen = "left"
    elif verdicts["right"] == PROVED:
        chosen = "right"
    else:
        chosen = "neither"  # only reachable on budget exhaustion
    return DPReport(gamma, alpha, beta, chosen, model, verdicts)


# ---------------------------------------------------------------------------
# Random model generation
# ---------------------------------------------------------------------------


def _ground_atoms(signature, domain):
    out = []
    for pred, arity in signature:
        for combo in itertools.product(domain, repeat=arity):
            out.append(Atom(pred, tuple(elem(c) for c in combo)))
    return out


def gen_qb_model(seed: int, signature, domain_size: int) -> QuasiBooleanModel:
    """Random valuation repaired to satisfy both closure conditions."""
    if domain_size < 1:
        raise ModelError("domain_size must be at least 1")
    rng = random.Random(seed)
    domain = tuple(f"e{i}" for i in range(domain_size))
    atoms = _ground_atoms(signature, domain)
    valuation: dict[Formula, int] = {a: rng.randint(0, 1) for a in atoms}
    const_interp = {}
    if rng.random() < 0.5:
        const_interp["c1"] = rng.choice(domain)
    m = QuasiBooleanModel(domain, const_interp, valuation)

    pool: list[Formula] = list(atoms) + [TOP]
    for _ in range(2):
        if len(atoms) >= 2:
            l, r = rng.sample(atoms, 2)
            pool.append(And(l, r) if rng.random() < 0.5 else Or(l, r))
    made: list[Formula] = []
    for _ in range(3 + rng.randrange(4)):
        left = rng.choice(pool + made)
        right = rng.choice(pool + made)
        k = Impl(left, right)
        if k in valuation:
            continue
        if _force_qb(m, right):
            val = 1
        elif _force_qb(m, left):
            val = 0
        else:
            val = rng.randint(0, 1)
        valuation[k] = val
        made.append(k)
    return m


def gen_kripke_model(seed: int, signature, shape: int) -> KripkeModel:
    """Random poset of at most four worlds with a repaired valuation."""
    if not 1 <= shape <= 4:
        raise ModelError("shape must be between 1 and 4 worlds")
    rng = random.Random(seed)
    worlds = tuple(f"w{i}" for i in range(shape))
    pairs = [(worlds[i], worlds[j])
             for i in range(shape) for j in range(i + 1, shape)
             if rng.random() < 0.5]
    order = closure(worlds, pairs)
    # prefix domains keep monotonicity trivial under the forward-only order
    domains = {worlds[i]: tuple(f"e{k}" for k in range(i + 1))
               for i in range(shape)}
    m = KripkeModel(worlds, order, domains, {}, {})
    for w in worlds:
        for k in _ground_atoms(signature, domains[w]):
            if (w, k) not in m.valuation:
                m.valuation[(w, k)] = rng.randint(0, 1)
    for (u, k) in sorted(m.valuation, key=lambda uk: (uk[0], fstr(uk[1]))):
        if m.valuation[(u, k)] == 1:
            for v in m.above(u):
                m.valuation[(v, k)] = 1

    pool = sorted({k for (_, k) in m.valuation}, key=fstr)
    if pool:
        for _ in range(2 + rng.randrange(3)):
            k = Impl(rng.choice(pool), rng.choice(pool))
            if any((w, k) in m.valuation for w in worlds):
                continue
            start = max((int(e[1:]) for a in (k.left, k.right)
                         for e in _elem_names(a)), default=0)
            spots = [w for i, w in enumerate(worlds) if i >= start]
            for w in spots:
                if _force_kripke(m, w, k.right):
                    val = 1
                elif all(not _force_kripke(m, v, k.left)
                         or _force_kripke(m, v, k.right)
                         for v in m.above(w)):
                    val = rng.randint(0, 1)
                else:
                    val = 0
                m.valuation[(w, k)] = val
            for w in spots:
                if m.valuation[(w, k)] == 1:
                    for v in m.above(w):
                        m.valuation[(v, k)] = 1
    return m


def _elem_names(f: Formula) -> set[str]:
    return free_vars(f)


def _sequent_keys(formulas, domain, const_interp) -> set[Formula]:
    keys: set[Formula] = set()
    for f in formulas:
        names = sorted(free_vars(f) - set(domain))
        for combo in itertools.product(domain, repeat=len(names)):
            g = to_key(f, domain, const_interp, dict(zip(names, combo)))
            keys |= instance_keys(g, domain, const_interp)
    return keys


def extend_qb_model(m: QuasiBooleanModel, s: Sequent, seed: int = 0) -> None:
    """Add repaired entries for every key the sequent can reach.

    Existing entries are untouched, so a checker-clean model stays clean:
    new implications are valued bottom-up with the forced cases honored.
    """
    rng = random.Random(seed)
    fs = sorted(s.ant | s.suc, key=fstr)
    for f in fs:
        for c in sorted(constants(f)):
            m.const_interp.setdefault(c, m.domain[0])
    keys = _sequent_keys(fs, m.domain, m.const_interp)
    for k in sorted((k for k in keys if isinstance(k, Atom)), key=fstr):
        m.valuation.setdefault(k, rng.randint(0, 1))
    for k in sorted((k for k in keys if isinstance(k, Impl)),
                    key=lambda k: (complexity(k), fstr(k))):
        if k in m.valuation:
            continue
        if _force_qb(m, k.right):
            val = 1
        elif _force_qb(m, k.left):
            val = 0
        else:
            val = rng.randint(0, 1)
        m.valuation[k] = val


def extend_kripke_model(m: KripkeModel, s: Sequent, seed: int = 0) -> None:
    """Kripke analogue of extend_qb_model with monotone repair."""
    rng = random.Random(seed)
    fs = sorted(s.ant | s.suc, key=fstr)
    base = m.domains[m.worlds[0]]
    for f in fs:
        for c in sorted(constants(f)):
            m.const_interp.setdefault(c, base[0])
    per_world = {u: sorted(_sequent_keys(fs, m.domains[u], m.const_interp),
                           key=lambda k: (complexity(k), fstr(k)))
                 for u in m.worlds}
    for u in m.worlds:
        for k in per_world[u]:
            if not isinstance(k, Atom) or (u, k) in m.valuation:
                continue
            below = [v for v in m.worlds if m.leq(v, u)]
            if any(m.valuation.get((v, k)) == 1 for v in below):
                m.valuation[(u, k)] = 1
            else:
                m.valuation[(u, k)] = rng.randint(0, 1)
    for (u, k) in sorted(m.valuation, key=lambda uk: (uk[0], fstr(uk[1]))):
        if isinstance(k, Atom) and m.valuation[(u, k)] == 1:
            for v in m.above(u):
                m.valuation[(v, k)] = 1
    impls = sorted({k for u in m.worlds for k in per_world[u]
                    if isinstance(k, Impl)},
                   key=lambda k: (complexity(k), fstr(k)))
    for k in impls:
        spots = [u for u in m.worlds if k in per_world[u]]
        for u in spots:
            if (u, k) in m.valuation:
                continue
            if _force_kripke(m, u, k.right):
                val = 1
            elif all(not _force_kripke(m, v, k.left)
                     or _force_kripke(m, v, k.right)
                     for v in m.above(u)):
                val = rng.randint(0, 1)
            else:
                val = 0
            m.valuation[(u, k)] = val
        for u in spots:
            if m.valuation.get((u, k)) == 1:
                for v in m.above(u):
                    if (v, k) not in m.valuation or m.valuation[(v, k)] != 1:
                        m.valuation[(v, k)] = 1


# ---------------------------------------------------------------------------
# Corpus runner
# ---------------------------------------------------------------------------


class CorpusError(ValueError):
    pass


@dataclass
class CorpusSummary:
    total: int = 0
    passed: int = 0
    mismatches: list[tuple[int, str, str, str]] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return len(self.mismatches)


_EXPECTATIONS = (PROVED, REFUTED, UNKNOWN)


def run_corpus(path: str, calculus_name: str,
               budget: Budget | None = None) -> CorpusSummary:
    budget = budget or Budget()
    try:
        text = open(path).read()
    except OSError as e:
        raise CorpusError(str(e))
    summary = CorpusSummary()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) != 3 or parts[0] != "EXPECT":
            raise CorpusError(
                f"line {lineno}: expected 'EXPECT proved|refuted|unknown <sequent>'")
        expected, stext = parts[1], parts[2]
        if expected not in _EXPECTATIONS:
            raise CorpusError(f"line {lineno}: unknown expectation {expected!r}")
        try:
            s = parse_sequent(stext)
        except ParseError as e:
            raise CorpusError(f"line {lineno}: {e}")
        got = prove(s, calculus_name, budget).status
        summary.total += 1
        if got == expected:
            summary.passed += 1
        else:
            summary.mismatches.append((lineno, expected, got, stext))
    return summary


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _budget_from(args) -> Budget:
    b = Budget()
    return Budget(getattr(args, "budget_steps", None) or b.max_steps,
                  getattr(args, "budget_nodes", None) or b.max_branch_nodes,
                  getattr(args, "budget_fresh", None) or b.max_fresh_vars)


def _calc(name: str) -> str:
    up = name.upper()
    if up not in CALCULI:
        raise ProofError(f"unknown calculus {name!r}")
    return up


def _read_proof(path: str) -> Derivation:
    with open(path) as fh:
        return derivation_from_dict(json.load(fh))


def _write_json(obj, path: str | None, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=out)


def _parse_signature(text: str):
    sig = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, arity = part.partition(":")
        sig.append((name.strip(), int(arity or 0)))
    return sig


def _build_parser() -> _Parser:
    p = _Parser(prog="primal")
    sub = p.add_subparsers(dest="cmd", required=True)
    calcs = [c.lower() for c in CALCULI]

    q = sub.add_parser("parse")
    q.add_argument("sequent")

    q = sub.add_parser("prove")
    q.add_argument("sequent")
    q.add_argument("--calculus", choices=calcs, default="qgpm")
    q.add_argument("--budget-steps", type=int)
    q.add_argument("--budget-nodes", type=int)
    q.add_argument("--budget-fresh", type=int)
    q.add_argument("--emit-proof")
    q.add_argument("--emit-countermodel")

    q = sub.add_parser("check-proof")
    q.add_argument("proof")
    q.add_argument("--calculus", choices=calcs, required=True)
    q.add_argument("--allow-cut", action="store_true")
    q.add_argument("--allow-cd", action="store_true")

    q = sub.add_parser("cut-eliminate")
    q.add_argument("proof")
    q.add_argument("-o", "--output")

    q = sub.add_parser("eval")
    q.add_argument("--model", required=True)
    q.add_argument("--sequent", required=True)
    q.add_argument("--kripke", action="store_true")

    q = sub.add_parser("check-model")
    q.add_argument("model")

    q = sub.add_parser("translate")
    q.add_argument("--from", dest="src", choices=calcs, required=True)
    q.add_argument("--to", dest="dst", choices=calcs, required=True)
    q.add_argument("--proof", required=True)
    q.add_argument("-o", "--output")

    q = sub.add_parser("dp-check")
    q.add_argument("--gamma", default="")
    q.add_argument("--alpha", required=True)
    q.add_argument("--beta", required=True)
    q.add_argument("--calculus", choices=["qgp", "qgpm"], default="qgpm")
    q.add_argument("--budget-steps", type=int)
    q.add_argument("--emit-model")

    q = sub.add_parser("corpus")
    q.add_argument("path")
    q.add_argument("--calculus", choices=calcs, required=True)
    q.add_argument("--budget-steps", type=int)

    q = sub.add_parser("gen-model")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--kind", choices=["qb", "kripke"], default="qb")
    q.add_argument("--signature", default="p:0,q:0,P:1")
    q.add_argument("--domain-size", type=int, default=2)
    q.add_argument("--worlds", type=int, default=2)
    return p


_TRANSLATIONS = {
    ("qgp", "qgpm"): "embed",
    ("qgpw", "qgpmw"): "embed",
    ("qgpm", "qgp"): "fold",
    ("qgpmw", "qgpw"): "fold",
    ("qp", "qgp"): "nd-out",
    ("qpw", "qgpw"): "nd-out",
    ("qgp", "qp"): "nd-in",
    ("qgpw", "qpw"): "nd-in",
}


def main(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args, out, err)
    except (ParseError, ModelError, ProofError, CorpusError, OSError,
            json.JSONDecodeError) as e:
        print(f"error: {e}", file=err)
        return 3


def _dispatch(args, out, err) -> int:
    if args.cmd == "parse":
        print(parse_sequent(args.sequent), file=out)
        return 0

    if args.cmd == "prove":
        s = parse_sequent(args.sequent)
        v = prove(s, _calc(args.calculus), _budget_from(args))
        print(v.status, file=out)
        if v.derivation is not None and args.emit_proof:
            _write_json(derivation_to_dict(v.derivation), args.emit_proof, out)
        if v.model is not None and args.emit_countermodel:
            with open(args.emit_countermodel, "w") as fh:
                fh.write(serialize_model(v.model))
        return {PROVED: 0, REFUTED: 1, UNKNOWN: 2}[v.status]

    if args.cmd == "check-proof":
        d = _read_proof(args.proof)
        res = check_derivation(d, _calc(args.calculus),
                               allow_cut=args.allow_cut,
                               allow_cd=args.allow_cd)
        if res.ok:
            print("ok", file=out)
            return 0
        loc = ".".join(str(i) for i in res.path) or "root"
        print(f"invalid at {loc}: {res.reason}", file=out)
        return 1

    if args.cmd == "cut-eliminate":
        d = _read_proof(args.proof)
        res = check_derivation(d, "QGP", allow_cut=True)
        if not res.ok:
            print(f"invalid input proof: {res.reason}", file=out)
            return 1
        e = eliminate_cut(d)
        _write_json(derivation_to_dict(e), args.output, out)
        print(f"cuts removed: {d.count_rule(CUT)}", file=err)
        return 0

    if args.cmd == "eval":
        m = parse_model(open(args.model).read())
        s = parse_sequent(args.sequent)
        if isinstance(m, KripkeModel):
            valid = sequent_valid_kripke(m, s)
        elif args.kripke:
            raise ModelError("model file is quasi-boolean, not Kripke")
        else:
            valid = sequent_valid_qb(m, s)
        print("valid" if valid else "invalid", file=out)
        return 0 if valid else 1

    if args.cmd == "check-model":
        m = parse_model(open(args.model).read())
        bad = check_kripke_model(m) if isinstance(m, KripkeModel) \
            else check_qb_valuation(m)
        for line in bad:
            print(line, file=out)
        print("ok" if not bad else f"{len(bad)} violation(s)", file=out)
        return 0 if not bad else 1

    if args.cmd == "translate":
        kind = _TRANSLATIONS.get((args.src, args.dst))
        if kind is None:
            raise ProofError(f"no translation from {args.src} to {args.dst}")
        d = _read_proof(args.proof)
        if kind == "embed":
            _write_json(derivation_to_dict(qgp_to_qgpm(d)), args.output, out)
        elif kind == "fold":
            rep = qgpm_to_qgp_cd(d)
            _write_json({
                "target": derivation_to_dict(rep.target),
                "cd_instances": [str(s) for s in rep.cd_instances],
                "cuts_introduced": rep.cuts_introduced,
            }, args.output, out)
        elif kind == "nd-out":
            _write_json(derivation_to_dict(nd_to_gentzen(d)), args.output, out)
        else:
            _write_json(derivation_to_dict(gentzen_to_nd(d)), args.output, out)
        return 0

    if args.cmd == "dp-check":
        gamma = [parse_formula(t) for t in args.gamma.split(";") if t.strip()]
        rep = dp_split(gamma, parse_formula(args.alpha),
                       parse_formula(args.beta), _calc(args.calculus),
                       _budget_from(args))
        print(f"chosen: {rep.chosen}", file=out)
        for k in ("or", "left", "right"):
            if k in rep.verdicts:
                print(f"{k}: {rep.verdicts[k]}", file=out)
        if rep.model is not None and args.emit_model:
            with open(args.emit_model, "w") as fh:
                fh.write(serialize_model(rep.model))
        if rep.chosen in ("left", "right"):
            return 0
        return 3 if rep.chosen == "non-harrop" else 2

    if args.cmd == "corpus":
        summary = run_corpus(args.path, _calc(args.calculus),
                             _budget_from(args))
        for lineno, expected, got, text in summary.mismatches:
            print(f"line {lineno}: expected {expected}, got {got}: {text}",
                  file=out)
        print(f"{summary.passed}/{summary.total} passed", file=out)
        return 0 if not summary.mismatches else 1

    if args.cmd == "gen-model":
        sig = _parse_signature(args.signature)
        if args.kind == "qb":
            m = gen_qb_model(args.seed, sig, args.domain_size)
        else:
            m = gen_kripke_model(args.seed, sig, args.worlds)
        print(serialize_model(m), end="", file=out)
        return 0

    raise AssertionError(args.cmd)


if __name__ == "__main__":
    sys.exit(main())
