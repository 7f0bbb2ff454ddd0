import itertools
import random
import stat
import sys
import time
from pathlib import Path

import pytest

from elfe import fol
from elfe.fol import And, App, Const, Eq, Forall, Implies, Not, Or, Pred, Var
from elfe.kernel import Obligation
from elfe.provers import (
    ProverConfig,
    ResolutionLimits,
    clausify,
    default_configs,
    find_model,
    portfolio,
    resolution_prove,
    run_external,
)
from elfe.provers.clausify import EQ
from elfe.tptp import ERROR, THEOREM, TIMEOUT, UNKNOWN


# ---------------------------------------------------------------------------
# Truth-table oracles (propositional fragment: 0-ary predicates only)


def prop_atoms(f):
    if isinstance(f, Pred):
        return {f.symbol}
    if isinstance(f, Not):
        return prop_atoms(f.body)
    if isinstance(f, (And, Or, Implies, fol.Iff)):
        return prop_atoms(f.left) | prop_atoms(f.right)
    return set()


def prop_eval(f, env):
    if isinstance(f, Pred):
        return env[f.symbol]
    if isinstance(f, Not):
        return not prop_eval(f.body, env)
    if isinstance(f, And):
        return prop_eval(f.left, env) and prop_eval(f.right, env)
    if isinstance(f, Or):
        return prop_eval(f.left, env) or prop_eval(f.right, env)
    if isinstance(f, Implies):
        return (not prop_eval(f.left, env)) or prop_eval(f.right, env)
    if isinstance(f, fol.Iff):
        return prop_eval(f.left, env) == prop_eval(f.right, env)
    raise TypeError(f)


def assignments(atoms):
    atoms = sorted(atoms)
    for bits in itertools.product([False, True], repeat=len(atoms)):
        yield dict(zip(atoms, bits))


def formulas_satisfiable(formulas):
    atoms = set().union(*(prop_atoms(f) for f in formulas)) or {"p"}
    return any(
        all(prop_eval(f, env) for f in formulas) for env in assignments(atoms)
    )


def clauses_satisfiable(clauses):
    atoms = sorted({p for c in clauses for _, p, _ in c})
    for env in assignments(atoms):
        if all(any(env[p] == s for s, p, _ in c) for c in clauses):
            return True
    return False


def entails(axioms, conjecture):
    return not formulas_satisfiable(list(axioms) + [Not(conjecture)])


def random_prop(rng, depth=3):
    atoms = ["p", "q", "r", "t"]
    if depth == 0 or rng.random() < 0.3:
        return Pred(rng.choice(atoms))
    k = rng.random()
    if k < 0.2:
        return Not(random_prop(rng, depth - 1))
    cls = rng.choice([And, Or, Implies, fol.Iff])
    return cls(random_prop(rng, depth - 1), random_prop(rng, depth - 1))


# ---------------------------------------------------------------------------
# clausify


def test_clausify_implication():
    clauses = clausify([Forall("x", Implies(Pred("p", (Var("x"),)),
                                            Pred("q", (Var("x"),))))])
    assert len(clauses) == 1
    (c,) = clauses
    assert {(s, p) for s, p, _ in c} == {(False, "p"), (True, "q")}


def test_clausify_skolemizes_existential():
    clauses = clausify([fol.Exists("x", Pred("p", (Var("x"),)))])
    (c,) = clauses
    ((s, p, args),) = c
    assert s and p == "p"
    assert args[0][0].startswith("sk")


def test_clausify_skolem_depends_on_universal_scope():
    f = Forall("x", fol.Exists("y", Pred("r", (Var("x"), Var("y")))))
    (c,) = clausify([f])
    ((_, _, args),) = c
    x, skt = args
    assert isinstance(x, int)
    assert skt[0].startswith("sk") and skt[1] == x


def test_clausify_appends_equality_axioms_when_needed():
    clauses = clausify([Eq(Const("a"), Const("b"))])
    preds = {p for c in clauses for _, p, _ in c}
    assert preds == {EQ}
    # reflexivity present
    assert any(len(c) == 1 and c[0][0] and c[0][2][0] == c[0][2][1] for c in clauses)
    without = clausify([Pred("p", (Const("a"),))])
    assert all(p != EQ for c in without for _, p, _ in c)


def test_clausify_requires_closed_input():
    with pytest.raises(ValueError, match="closed"):
        clausify([Pred("p", (Var("x"),))])


def test_clausify_equisatisfiable_with_truth_tables():
    rng = random.Random(2024)
    for _ in range(300):
        f = random_prop(rng)
        clauses = clausify([f])
        assert clauses_satisfiable(clauses) == formulas_satisfiable([f]), fol.render(f)


# ---------------------------------------------------------------------------
# resolution


def test_resolution_one_step():
    axioms = [
        Pred("p", (Const("a"),)),
        Forall("x", Implies(Pred("p", (Var("x"),)), Pred("q", (Var("x"),)))),
    ]
    assert resolution_prove(axioms, Pred("q", (Const("a"),))) == THEOREM


def test_resolution_no_refutation():
    limits = ResolutionLimits(max_seconds=1.0, max_clauses=1000)
    assert resolution_prove([], Pred("p", (Const("a"),)), limits) == UNKNOWN


def test_resolution_with_equality():
    axioms = [
        Eq(Const("a"), Const("b")),
        Pred("p", (Const("a"),)),
    ]
    assert resolution_prove(axioms, Pred("p", (Const("b"),))) == THEOREM


def test_resolution_needs_factoring():
    # p(x) | p(y) and ~p(u) | ~p(v) refute only via factoring
    from elfe.provers.resolution import saturate_clauses

    clauses = [
        ((True, "p", (0,)), (True, "p", (1,))),
        ((False, "p", (0,)), (False, "p", (1,))),
    ]
    assert saturate_clauses(clauses) == THEOREM


def test_resolution_sound_against_truth_tables():
    rng = random.Random(99)
    limits = ResolutionLimits(max_seconds=0.5, max_clauses=3000)
    proved = 0
    for _ in range(200):
        axioms = [random_prop(rng, 2) for _ in range(rng.randint(0, 3))]
        conjecture = random_prop(rng, 2)
        if resolution_prove(axioms, conjecture, limits) == THEOREM:
            proved += 1
            assert entails(axioms, conjecture), (
                [fol.render(a) for a in axioms],
                fol.render(conjecture),
            )
    assert proved >= 40  # the suite is not vacuous


# ---------------------------------------------------------------------------
# model finder


def test_find_model_separates_constants():
    model = find_model(
        [Pred("p", (Const("a"),))], Pred("p", (Const("b"),)), max_domain=2
    )
    assert model is not None
    assert model.size <= 2
    assert model.eval(Pred("p", (Const("a"),)))
    assert not model.eval(Pred("p", (Const("b"),)))


def test_find_model_none_for_valid_conjecture():
    model = find_model(
        [Pred("p", (Const("a"),))], Pred("p", (Const("a"),)), max_domain=3
    )
    assert model is None


def test_find_model_respects_identity_equality():
    # a = b forces the constants onto one element, so p(a) entails p(b)
    model = find_model(
        [Eq(Const("a"), Const("b")), Pred("p", (Const("a"),))],
        Pred("p", (Const("b"),)),
        max_domain=3,
    )
    assert model is None


def test_find_model_functions_are_total():
    f = Forall("x", Pred("p", (App("f", (Var("x"),)),)))
    model = find_model([f, Not(Pred("p", (Const("a"),)))], None, max_domain=3)
    assert model is not None
    pts = model.funcs["f"]
    assert set(pts) == {(d,) for d in range(model.size)}


def test_find_model_quantified_difference():
    # something is q but not everything
    axioms = [
        fol.Exists("x", Pred("q", (Var("x"),))),
        fol.Exists("x", Not(Pred("q", (Var("x"),)))),
    ]
    model = find_model(axioms, None, max_domain=3)
    assert model is not None
    assert model.size >= 2


def test_model_render_mentions_tables():
    model = find_model(
        [Pred("p", (Const("a"),))], Pred("p", (Const("b"),)), max_domain=2
    )
    text = model.render()
    assert "domain:" in text and "p:" in text and "a =" in text


# ---------------------------------------------------------------------------
# external provers (stub scripts)


def make_stub(tmp_path: Path, name: str, body: str) -> str:
    path = tmp_path / name
    path.write_text(f"#!{sys.executable}\n{body}")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_run_external_theorem_stub(tmp_path):
    stub = make_stub(tmp_path, "yes.py", "print('SZS status Theorem')\n")
    cfg = ProverConfig("stub", command=f"{stub} {{file}}", timeout=5)
    assert run_external(cfg, "fof(goal, conjecture, p).").status == THEOREM


def test_run_external_timeout(tmp_path):
    stub = make_stub(tmp_path, "sleep.py", "import time; time.sleep(60)\n")
    cfg = ProverConfig("sleeper", command=f"{stub} {{file}}", timeout=0.2)
    start = time.monotonic()
    verdict = run_external(cfg, "fof(goal, conjecture, p).")
    assert verdict.status == TIMEOUT
    assert time.monotonic() - start < 30


def test_run_external_missing_binary():
    cfg = ProverConfig("ghost", command="/nonexistent/prover {file}", timeout=1)
    assert run_external(cfg, "fof(goal, conjecture, p).").status == ERROR


def test_run_external_crash_is_error(tmp_path):
    stub = make_stub(tmp_path, "boom.py", "import sys; sys.exit(3)\n")
    cfg = ProverConfig("boom", command=f"{stub} {{file}}", timeout=2)
    assert run_external(cfg, "fof(goal, conjecture, p).").status == ERROR


# ---------------------------------------------------------------------------
# portfolio


def _ob(conclusion, axioms=()):
    return Obligation("s1", tuple(axioms), conclusion)


def test_portfolio_first_theorem_wins(tmp_path):
    stub = make_stub(tmp_path, "yes.py", "print('SZS status Theorem')\n")
    sleeper = make_stub(tmp_path, "sleep.py", "import time; time.sleep(30)\n")
    cfgs = [
        ProverConfig("fast", command=f"{stub} {{file}}", timeout=5),
        ProverConfig("slow", command=f"{sleeper} {{file}}", timeout=25),
    ]
    start = time.monotonic()
    result = portfolio(_ob(Pred("p")), cfgs)
    assert result.verdict == "Proved" and result.prover == "fast"
    # the sleeper was cancelled, not awaited
    assert time.monotonic() - start < 20


def test_portfolio_refutation_with_verified_model():
    ob = _ob(Pred("p", (Const("b"),)), [("ax", Pred("p", (Const("a"),)))])
    result = portfolio(ob, default_configs(timeout=10.0))
    assert result.verdict == "Refuted"
    assert result.prover == "modelfinder"
    assert "domain:" in result.model


def test_portfolio_unknown_when_nothing_decides(tmp_path):
    stub = make_stub(tmp_path, "shrug.py", "print('SZS status GaveUp')\n")
    cfgs = [ProverConfig("shrug", command=f"{stub} {{file}}", timeout=5)]
    result = portfolio(_ob(Pred("p")), cfgs)
    assert result.verdict == UNKNOWN and result.prover is None


def test_portfolio_verdict_independent_of_completion_order(tmp_path):
    # same verdict set arriving in any order yields the same result
    quick = make_stub(tmp_path, "q.py", "print('SZS status Theorem')\n")
    slow = make_stub(
        tmp_path, "s.py", "import time; time.sleep(0.4); print('SZS status Theorem')\n"
    )
    a = ProverConfig("alpha", command=f"{quick} {{file}}", timeout=5)
    b = ProverConfig("beta", command=f"{slow} {{file}}", timeout=5)
    r1 = portfolio(_ob(Pred("p")), [a, b])
    # swap delays: beta now answers first, but config order still breaks ties
    a2 = ProverConfig("alpha", command=f"{slow} {{file}}", timeout=5)
    b2 = ProverConfig("beta", command=f"{quick} {{file}}", timeout=5)
    r2 = portfolio(_ob(Pred("p")), [a2, b2])
    # the verdict is a pure function of the answers, whatever arrives first
    assert r1.verdict == r2.verdict == "Proved"
    for r in (r1, r2):
        assert r.verdicts[r.prover].status == THEOREM


def test_portfolio_conflicting_decisives_is_error(tmp_path):
    yes = make_stub(tmp_path, "yes.py", "print('SZS status Theorem')\n")
    no = make_stub(
        tmp_path, "no.py",
        "print('SZS status CounterSatisfiable')\n",
    )
    cfgs = [
        ProverConfig("yes", command=f"{yes} {{file}}", timeout=5),
        ProverConfig("no", command=f"{no} {{file}}", timeout=5),
    ]
    # both decisive answers may race past cancellation; when both are present
    # the portfolio must refuse to guess
    for _ in range(5):
        result = portfolio(_ob(Pred("p")), cfgs)
        assert result.verdict in ("Proved", "Refuted", ERROR)
        if len(result.verdicts) == 2 and result.verdicts.get("no") and \
           result.verdicts["no"].status == "CounterSatisfiable" and \
           result.verdicts.get("yes") and result.verdicts["yes"].status == THEOREM:
            assert result.verdict == ERROR


def test_prover_config_requires_single_file_placeholder():
    with pytest.raises(ValueError, match="exactly once"):
        ProverConfig("bad", command="prover --no-file")
    with pytest.raises(ValueError, match="exactly once"):
        ProverConfig("bad", command="prover {file} {file}")
    with pytest.raises(ValueError, match="kind"):
        ProverConfig("bad", kind="quantum")
