import random

import pytest

from elfe import fol
from elfe.fol import And, Const, Eq, Implies, Pred, render
from elfe.kernel import (
    Assumed,
    ByContext,
    BySequence,
    BySplit,
    BySubContext,
    ElabError,
    Statement,
    collect_obligations,
    context_of,
    elaborate,
    leaves,
    matches,
)
from elfe.lang import apply_let_bindings, parse_document

from texts import INJECTIVITY, INJECTIVITY_HINTED, LIB_DIR, RELATIONS, RELATIONS_WRONG


def pipeline(text):
    return elaborate(apply_let_bindings(parse_document(text, search_path=[LIB_DIR])))


# ---------------------------------------------------------------------------
# The worked example: tree shape and conjectures


def test_injectivity_has_exactly_three_obligation_leaves():
    elab = pipeline(INJECTIVITY)
    obls = collect_obligations(elab)
    assert len(obls) == 3


def test_injectivity_conjectures_match_the_construction():
    elab = pipeline(INJECTIVITY)
    soundness, cornerstone, final = collect_obligations(elab)

    q = fol.parse(
        "forall x, x'. (funApp(cf,x) = funApp(cf,x') and in(x,cA) and in(x',cA))"
        " implies x = x'"
    )
    assert matches(soundness.conjecture,
                   Implies(q, Pred("injective", (Const("cf"),))))

    comp = fol.App("composition", (Const("cg"), Const("cf")))
    assert cornerstone.conjecture == Eq(
        fol.App("funApp", (comp, Const("cx"))),
        fol.App("funApp", (comp, Const("cx'"))),
    )

    assert final.conjecture == Eq(Const("cx"), Const("cx'"))


def test_injectivity_frozen_constants_carry_c_prefix():
    elab = pipeline(INJECTIVITY)
    syms = set()
    for ob in collect_obligations(elab):
        syms |= fol.symbols(ob.conjecture)
    assert {"cx", "cx'", "cf", "cg"} <= syms


def test_hints_only_change_leaf_kind_not_shape():
    plain = collect_obligations(pipeline(INJECTIVITY))
    hinted = collect_obligations(pipeline(INJECTIVITY_HINTED))
    assert len(hinted) == 3
    assert [o.conjecture for o in plain] == [o.conjecture for o in hinted]


def test_hinted_contexts_are_restricted():
    elab = pipeline(INJECTIVITY_HINTED)
    soundness, cornerstone, final = collect_obligations(elab)
    assert [i for i, _ in soundness.axioms][0] == "injectiveApp"
    # the final step sees the cornerstone through the local context
    assert cornerstone.conjecture in [g for _, g in final.axioms]
    # but not the whole library
    assert len(final.axioms) < len(
        [s for s in elab.statements if isinstance(s.proof, Assumed)]
    )


def test_simple_implication_unfold():
    elab = elaborate(apply_let_bindings(
        parse_document("Lemma: P implies P. Proof: Assume P. Hence P. qed.")
    ))
    (ob,) = collect_obligations(elab)
    assert ob.conjecture == Pred("P")
    assert Pred("P") in [g for _, g in ob.axioms]


def test_assume_matches_up_to_conjunct_reordering():
    text = (
        "Lemma: (P and Q) implies R. Proof: Assume Q and P. Hence R. qed."
    )
    elab = elaborate(apply_let_bindings(parse_document(text)))
    (ob,) = collect_obligations(elab)
    assert ob.conjecture == Pred("R")


def test_hence_mismatch_is_reported_with_both_formulas():
    text = "Lemma: P implies Q. Proof: Assume P. Hence R. qed."
    with pytest.raises(ElabError) as exc:
        elaborate(apply_let_bindings(parse_document(text)))
    assert "R" in str(exc.value) and "Q" in str(exc.value)


def test_then_with_unknown_symbol_rejected():
    text = "Lemma: P implies Q. Proof: Assume P. Then r(z). Hence Q. qed."
    with pytest.raises(ElabError, match="never introduced"):
        elaborate(apply_let_bindings(parse_document(text)))


def test_unknown_hint_rejected():
    text = "Lemma: P implies Q. Proof: Assume P. Hence Q by nonsense. qed."
    with pytest.raises(ElabError, match="unknown hint"):
        elaborate(apply_let_bindings(parse_document(text)))


def test_relations_proof_shape():
    elab = pipeline(RELATIONS)
    obls = collect_obligations(elab)
    # soundness check, the union disjunction, two per case 1, four per case 2,
    # and the coverage Hence
    sub_leaves = [s for s in leaves(elab) if isinstance(s.proof, BySubContext)]
    assert len(sub_leaves) == 4
    case_stmts = [s for s in elab.index.values() if s.role == "case"]
    assert len(case_stmts) == 2
    for s in case_stmts:
        assert isinstance(s.goal, Implies)
    # the coverage Hence sees both case implications
    hence_leaf = next(s for s in leaves(elab) if s.role == "hence")
    ctx_goals = [g for _, g in context_of(elab, hence_leaf.id)]
    for s in case_stmts:
        assert s.goal in ctx_goals


def test_relations_wrong_claim_is_restricted_to_the_hint():
    elab = pipeline(RELATIONS_WRONG)
    obls = collect_obligations(elab)
    bad = [o for o in obls if o.statement_id ==
           next(s.id for s in leaves(elab) if s.role == "then")]
    (ob,) = bad
    names = [i for i, _ in ob.axioms]
    assert names[0] == "subrelation"
    # the union/inverse theory is *not* in the restricted context
    assert "relationUnion" not in names and "relationInverse" not in names


def test_ids_unique_and_goals_closed():
    elab = pipeline(RELATIONS)
    seen = set()

    def walk(s):
        assert s.id not in seen
        seen.add(s.id)
        assert fol.free_vars(s.goal) == []
        for c in s.children():
            walk(c)

    for s in elab.statements:
        walk(s)


def test_elaboration_deterministic():
    a = collect_obligations(pipeline(RELATIONS))
    b = collect_obligations(pipeline(RELATIONS))
    assert [(o.statement_id, render(o.conjecture), [i for i, _ in o.axioms])
            for o in a] == \
           [(o.statement_id, render(o.conjecture), [i for i, _ in o.axioms])
            for o in b]


# ---------------------------------------------------------------------------
# Definition-2 fidelity on random trees


def _random_tree(rng: random.Random, depth: int, counter: list[int]) -> Statement:
    counter[0] += 1
    sid = f"t{counter[0]}"
    goal = Pred(f"g{counter[0]}")
    if depth == 0 or rng.random() < 0.35:
        proof = rng.choice([Assumed(), ByContext()])
        return Statement(sid, goal, proof)
    kids = tuple(
        _random_tree(rng, depth - 1, counter) for _ in range(rng.randint(1, 3))
    )
    proof = BySequence(kids) if rng.random() < 0.6 else BySplit(kids)
    return Statement(sid, goal, proof)


def _oracle_context(roots, target_id):
    """Independent recursion straight from the definition: preceding sibling
    goals union the parent's context."""
    parent: dict[str, tuple] = {}

    def index(stmts, parent_key):
        for i, s in enumerate(stmts):
            parent[s.id] = (parent_key, stmts, i)
            index(s.children(), s)

    index(tuple(roots), None)

    def gamma(s) -> set:
        if s is None:
            return set()
        parent_key, siblings, i = parent[s.id]
        sibs = set()
        if not (parent_key is not None and isinstance(parent_key.proof, BySplit)):
            sibs = {(t.id, render(t.goal)) for t in siblings[:i]}
        return sibs | (gamma(parent_key) if parent_key is not None else set())

    return gamma


def test_context_agrees_with_independent_definition_recursion():
    rng = random.Random(7)
    from elfe.kernel import Elaboration

    for _ in range(200):
        counter = [0]
        roots = [_random_tree(rng, 3, counter) for _ in range(rng.randint(1, 3))]
        elab = Elaboration(statements=list(roots))
        gamma = _oracle_context(roots, None)

        def check(s):
            got = {(i, render(g)) for i, g in context_of(elab, s.id)}
            assert got == gamma(s), s.id
            for c in s.children():
                check(c)

        for r in roots:
            check(r)


def test_split_children_share_identical_contexts():
    for text in (INJECTIVITY, RELATIONS, RELATIONS_WRONG):
        elab = pipeline(text)

        def walk(s):
            if isinstance(s.proof, BySplit):
                ctxs = {context_of(elab, c.id) for c in s.proof.children}
                assert len(ctxs) == 1
            for c in s.children():
                walk(c)

        for s in elab.statements:
            walk(s)


def test_nested_foralls_freeze_in_one_step():
    # one-step freezing of a two-variable prefix equals two successive
    # applications, and the frozen goal follows from the quantified one
    from elfe.fol import Forall, freeze
    from elfe.provers import resolution_prove
    from elfe.tptp import THEOREM

    goal = Forall("x", Forall("y", Pred("p", (fol.Var("x"), fol.Var("y")))))
    both, fmap = freeze(goal, ["x", "y"])
    assert fmap == {"x": "cx", "y": "cy"}
    once, fmap1 = freeze(goal, ["x"])
    twice, fmap2 = freeze(once, ["y"])
    assert both == twice and {**fmap1, **fmap2} == fmap
    assert resolution_prove([goal], both) == THEOREM
