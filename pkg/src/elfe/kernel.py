"""Elaboration of parsed proofs into statement trees.

A statement is (id, goal, proof) where the proof is one of: Assumed,
ByContext, BySubContext (context restricted via hints), BySequence, or
BySplit.  Elaboration composes four sound constructions:

* universal introduction — outer universally quantified meta-variables are
  frozen into fresh "c"-prefixed constants (a single child statement carries
  the frozen goal);
* implication introduction — an Assume matching the pending goal's
  antecedent becomes an Assumed sibling, and the body continues against the
  consequent;
* goal splitting — an Assume that does not match the antecedent starts an
  alternative goal Q: a BySplit with a soundness-check leaf (Q implies the
  pending goal) and a subproof of Q.  Split children do not see each other's
  goals;
* cornerstones — a Then step becomes a leaf obligation whose goal enters the
  context of the remainder.

Case blocks become implications (case formula implies the case's derived
conclusion); coverage is checked semantically by the following Hence.

The context of a statement is the goals of its preceding siblings plus the
context of its parent (empty at the top level).  A ByContext leaf is checked
against its full context.  A BySubContext leaf is checked against the goals
of the hinted statements plus its lemma-local context: everything assumed or
derived inside the current lemma's own tree still applies, while unhinted
global axioms are dropped.  (The local part includes derived cornerstones,
not just assumptions: each was established from an earlier context, so the
restriction stays sound, and hinted chains like "Then R[y,x] ...; Then S[y,x]
by subrelation" remain provable.)

The soundness check of a split is always verified against the full context.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fol
from .fol import Const, Formula, Implies, conj, forall_prefix, free_vars, freeze
from .lang.ast import (
    Assume,
    CaseBlock,
    Definition,
    Document,
    Hence,
    Lemma,
    LangError,
    ProofStep,
    SubProof,
    Then,
)
from .lang.tokens import SourceSpan


class ElabError(LangError):
    """Elaboration failure (unknown hint, unmatched step, open formula...)."""


# ---------------------------------------------------------------------------
# Statement trees


@dataclass(frozen=True, slots=True)
class Assumed:
    pass


@dataclass(frozen=True, slots=True)
class ByContext:
    pass


@dataclass(frozen=True, slots=True)
class BySubContext:
    ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class BySequence:
    children: tuple["Statement", ...]


@dataclass(frozen=True, slots=True)
class BySplit:
    children: tuple["Statement", ...]


Proof = Assumed | ByContext | BySubContext | BySequence | BySplit


@dataclass(frozen=True, slots=True)
class Statement:
    id: str
    goal: Formula
    proof: Proof
    span: SourceSpan | None = None
    # reporting provenance: axiom | root | auto | assume | then | hence |
    # goal | soundness | case | subproof
    role: str = "auto"

    def children(self) -> tuple["Statement", ...]:
        if isinstance(self.proof, (BySequence, BySplit)):
            return self.proof.children
        return ()

    def is_leaf(self) -> bool:
        return isinstance(self.proof, (ByContext, BySubContext))


@dataclass(frozen=True, slots=True)
class Obligation:
    statement_id: str
    axioms: tuple[tuple[str, Formula], ...]
    conjecture: Formula


@dataclass(slots=True)
class Elaboration:
    """A document's top-level statement sequence plus an id index."""

    statements: list[Statement] = field(default_factory=list)
    index: dict[str, Statement] = field(default_factory=dict)
    lemma_roots: list[str] = field(default_factory=list)


# A statement under construction: proof plus the span/role of whatever step
# concluded it (so leaves keep their source line).
_Built = tuple[Proof, SourceSpan | None, str]


# ---------------------------------------------------------------------------
# Structural matching (equality up to conjunct reordering)


def normalize(f: Formula) -> Formula:
    """Canonical form for matching: conjunction trees flattened and sorted."""
    if isinstance(f, fol.And):
        parts = sorted((normalize(p) for p in fol.conjuncts(f)), key=fol.render)
        return conj(parts)
    if isinstance(f, fol.Not):
        return fol.Not(normalize(f.body))
    if isinstance(f, (fol.Or, fol.Implies, fol.Iff)):
        return type(f)(normalize(f.left), normalize(f.right))
    if isinstance(f, (fol.Forall, fol.Exists)):
        return type(f)(f.var, normalize(f.body))
    return f


def matches(a: Formula, b: Formula) -> bool:
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# Elaborator


class Elaborator:
    def __init__(self) -> None:
        self.counter = 0
        self.result = Elaboration()
        self.reserved: set[str] = set()

    # -- id management ------------------------------------------------------

    def _taken(self, sid: str) -> bool:
        return sid in self.result.index or sid in self.reserved

    def fresh_id(self) -> str:
        self.counter += 1
        while self._taken(f"s{self.counter}"):
            self.counter += 1
        return f"s{self.counter}"

    def named_id(self, name: str) -> str:
        base = "".join(c if c.isalnum() else "_" for c in name) or "axiom"
        cand, n = base, 1
        while self._taken(cand):
            n += 1
            cand = f"{base}{n}"
        self.reserved.add(cand)
        return cand

    def stmt(
        self,
        goal: Formula,
        proof: Proof,
        span: SourceSpan | None,
        role: str,
        id: str | None = None,
    ) -> Statement:
        sid = id if id is not None else self.fresh_id()
        if free_vars(goal):
            raise ElabError(
                f"internal: open goal for {sid}: {fol.render(goal)}", span
            )
        s = Statement(sid, goal, proof, span, role)
        self.result.index[sid] = s
        return s

    def leaf_proof(self, hints: tuple[str, ...], span: SourceSpan | None) -> Proof:
        if not hints:
            return ByContext()
        ids = []
        for h in hints:
            if h not in self.result.index:
                raise ElabError(f"unknown hint '{h}'", span)
            ids.append(h)
        return BySubContext(tuple(ids))

    # -- document -----------------------------------------------------------

    def elaborate_document(self, doc: Document) -> Elaboration:
        for item in doc.items:
            if isinstance(item, Definition):
                goal = item.formula
                if free_vars(goal):
                    raise ElabError(
                        f"definition '{item.name}' mentions unbound symbols: "
                        f"{', '.join(free_vars(goal))}",
                        item.span,
                    )
                s = self.stmt(goal, Assumed(), item.span, "axiom",
                              id=self.named_id(item.name))
                self.result.statements.append(s)
            elif isinstance(item, Lemma):
                s = self.elaborate_lemma(item)
                self.result.statements.append(s)
                self.result.lemma_roots.append(s.id)
        return self.result

    # -- lemmas ---------------------------------------------------------------

    def elaborate_lemma(self, lemma: Lemma) -> Statement:
        goal = lemma.formula
        open_vars = free_vars(goal)
        if open_vars:
            raise ElabError(
                f"lemma mentions unbound symbols: {', '.join(open_vars)}",
                lemma.header_span,
            )
        root_id = self.named_id(lemma.name)
        auto = list(lemma.auto_bound)
        if not auto:
            proof, _, _ = self.prove(goal, list(lemma.proof), {}, lemma.qed_span)
        else:
            binders, _ = forall_prefix(goal)
            prefix = [b.var for b in binders[: len(auto)]]
            if prefix != auto:
                raise ElabError("internal: auto-bound prefix mismatch", lemma.span)
            frozen, fmap = freeze(goal, auto)
            env = {v: Const(c) for v, c in fmap.items()}
            guarded = any(b.guard is not None for b in binders[: len(auto)])
            if guarded:
                assert isinstance(frozen, Implies)
                assumed = self.stmt(frozen.left, Assumed(), lemma.header_span, "auto")
                inner = self.stmt(
                    frozen.right,
                    *self.prove(frozen.right, list(lemma.proof), env, lemma.qed_span),
                )
                frozen_stmt = self.stmt(
                    frozen, BySequence((assumed, inner)), lemma.header_span, "auto"
                )
            else:
                frozen_stmt = self.stmt(
                    frozen, *self.prove(frozen, list(lemma.proof), env, lemma.qed_span)
                )
            proof = BySequence((frozen_stmt,))
        s = Statement(root_id, goal, proof, lemma.span, "root")
        self.result.index[root_id] = s
        return s

    # -- step elaboration -------------------------------------------------------

    def prove(
        self,
        goal: Formula,
        steps: list[ProofStep],
        env: dict[str, Const],
        end_span: SourceSpan,
    ) -> _Built:
        """Build the proof of a statement carrying `goal` from user steps.

        Returns (proof, span, role) so the caller can place the statement:
        leaves keep the span of the step that concluded them.
        """
        if not steps:
            # nothing given: the goal itself goes to the provers
            return ByContext(), end_span, "goal"
        step = steps[0]

        if isinstance(step, Assume):
            phi = fol.substitute_all(step.formula, env)
            if isinstance(goal, Implies) and matches(phi, goal.left):
                assumed = self.stmt(phi, Assumed(), step.span, "assume")
                inner = self.stmt(
                    goal.right, *self.prove(goal.right, steps[1:], env, end_span)
                )
                return BySequence((assumed, inner)), end_span, "auto"
            return self.split_goal(goal, steps, env, end_span)

        if isinstance(step, Then):
            phi = self.closed_step_formula(step.formula, env, step.span, "Then")
            corner = self.stmt(phi, self.leaf_proof(step.hints, step.span),
                               step.span, "then")
            inner = self.stmt(goal, *self.prove(goal, steps[1:], env, end_span))
            return BySequence((corner, inner)), end_span, "auto"

        if isinstance(step, Hence):
            phi = fol.substitute_all(step.formula, env)
            if matches(phi, goal):
                if steps[1:]:
                    raise ElabError(
                        "steps after the concluding Hence", steps[1].span
                    )
                return self.leaf_proof(step.hints, step.span), step.span, "hence"
            raise ElabError(
                "Hence does not match the pending goal: derived "
                f"'{fol.render(phi)}' but the goal is '{fol.render(goal)}'",
                step.span,
            )

        if isinstance(step, CaseBlock):
            return self.case_distinction(goal, steps, env, end_span)

        if isinstance(step, SubProof):
            psi = self.closed_step_formula(step.goal, env, step.span, "Proof")
            sub = self.stmt(
                psi,
                self.prove(psi, list(step.steps), env, step.qed_span)[0],
                step.header_span,
                "subproof",
            )
            inner = self.stmt(goal, *self.prove(goal, steps[1:], env, end_span))
            return BySequence((sub, inner)), end_span, "auto"

        raise ElabError(f"unsupported step {step!r}", getattr(step, "span", None))

    def closed_step_formula(
        self, f: Formula, env: dict[str, Const], span: SourceSpan, kind: str
    ) -> Formula:
        out = fol.substitute_all(f, env)
        open_vars = free_vars(out)
        if open_vars:
            raise ElabError(
                f"{kind} step mentions symbols never introduced: "
                f"{', '.join(open_vars)}",
                span,
            )
        return out

    # -- the split construction ---------------------------------------------------

    def split_goal(
        self,
        goal: Formula,
        steps: list[ProofStep],
        env: dict[str, Const],
        end_span: SourceSpan,
    ) -> _Built:
        """An Assume that does not open the pending goal starts an
        alternative goal Q; Q implies the goal is checked as a separate
        obligation and Q is proved by the sub-derivation."""
        assume = steps[0]
        assert isinstance(assume, Assume)
        phi = fol.substitute_all(assume.formula, env)

        body, psi, closer = self.scan_alternative(goal, steps, env)
        q = fol.universal_closure(Implies(phi, psi))

        closer_hints: tuple[str, ...] = closer.hints if closer is not None else ()
        # without an explicit closing Hence the soundness check reports on
        # the block's qed line
        closer_span = closer.span if closer is not None else end_span
        soundness = self.stmt(
            Implies(q, goal),
            self.leaf_proof(closer_hints, closer_span),
            closer_span,
            "soundness",
        )

        q_vars = free_vars(Implies(phi, psi))
        if q_vars:
            frozen, fmap = freeze(q, q_vars)
            env2 = {**env, **{v: Const(c) for v, c in fmap.items()}}
            inner = self.stmt(
                frozen, *self.prove(frozen, body, env2, end_span)
            )
            alt = self.stmt(q, BySequence((inner,)), assume.span, "auto")
        else:
            alt = self.stmt(q, *self.prove(q, body, env, end_span))
        return BySplit((soundness, alt)), end_span, "auto"

    def scan_alternative(
        self,
        goal: Formula,
        steps: list[ProofStep],
        env: dict[str, Const],
    ) -> tuple[list[ProofStep], Formula, Hence | None]:
        """Delimit the alternative sub-derivation starting at an Assume.

        Returns (body, psi, closer): `body` proves the alternative goal's
        consequent `psi`; `closer` is the trailing Hence restating the
        pending goal, when present.
        """
        for i in range(1, len(steps)):
            step = steps[i]
            if not isinstance(step, Hence):
                continue
            phi = fol.substitute_all(step.formula, env)
            if matches(phi, goal):
                # the Hence restates the pending goal: the derivation before
                # it supplies the conclusion
                psi = self.last_derived(steps[1:i], env, step)
                if steps[i + 1 :]:
                    raise ElabError(
                        "steps after the concluding Hence", steps[i + 1].span
                    )
                return steps[:i], psi, step
            # this Hence concludes the sub-derivation
            body = steps[: i + 1]
            closer: Hence | None = None
            rest = steps[i + 1 :]
            if rest:
                nxt = rest[0]
                if (
                    isinstance(nxt, Hence)
                    and matches(fol.substitute_all(nxt.formula, env), goal)
                ):
                    closer = nxt
                    if rest[1:]:
                        raise ElabError(
                            "steps after the concluding Hence", rest[1].span
                        )
                else:
                    raise ElabError(
                        "expected a concluding Hence restating the goal "
                        f"'{fol.render(goal)}'",
                        getattr(nxt, "span", None),
                    )
            return body, phi, closer
        # no Hence at all: the last derived step is the conclusion
        psi = self.last_derived(steps[1:], env, steps[0])
        return steps, psi, None

    def last_derived(
        self, span_steps: list[ProofStep], env: dict[str, Const], at: ProofStep
    ) -> Formula:
        for step in reversed(span_steps):
            if isinstance(step, (Then, Hence)):
                return fol.substitute_all(step.formula, env)
        raise ElabError(
            "an assumption needs a derivation (Then/Hence) before the goal "
            "is concluded",
            getattr(at, "span", None),
        )

    # -- case distinctions ------------------------------------------------------------

    def case_distinction(
        self,
        goal: Formula,
        steps: list[ProofStep],
        env: dict[str, Const],
        end_span: SourceSpan,
    ) -> _Built:
        cases: list[CaseBlock] = []
        rest = list(steps)
        while rest and isinstance(rest[0], CaseBlock):
            cases.append(rest.pop(0))
        children: list[Statement] = []
        for case in cases:
            c = self.closed_step_formula(case.case, env, case.span, "Case")
            if not case.steps:
                raise ElabError("empty case body", case.span)
            k = self.last_derived(list(case.steps), env, case)
            if free_vars(k):
                raise ElabError(
                    "case conclusion mentions symbols never introduced",
                    case.span,
                )
            assumed = self.stmt(c, Assumed(), case.header_span, "assume")
            inner = self.stmt(
                k, self.prove(k, list(case.steps), env, case.qed_span)[0],
                case.qed_span, "auto",
            )
            case_stmt = self.stmt(
                Implies(c, k), BySequence((assumed, inner)),
                case.header_span, "case",
            )
            children.append(case_stmt)
        tail = self.stmt(goal, *self.prove(goal, rest, env, end_span))
        children.append(tail)
        return BySequence(tuple(children)), end_span, "auto"


def elaborate(doc: Document) -> Elaboration:
    """Elaborate every lemma of an already desugared, Let-applied document."""
    return Elaborator().elaborate_document(doc)


# ---------------------------------------------------------------------------
# Contexts (Definition of the statement context) and obligations


def context_of(elab: Elaboration, target_id: str) -> tuple[tuple[str, Formula], ...]:
    """The context of a statement: goals of preceding siblings plus the
    parent's context; BySplit children do not see their siblings."""
    found: list[tuple[tuple[str, Formula], ...]] = []

    def walk(stmts: tuple[Statement, ...], inherited: tuple) -> None:
        acc = inherited
        for s in stmts:
            if s.id == target_id:
                found.append(acc)
            if isinstance(s.proof, BySequence):
                walk(s.proof.children, acc)
            elif isinstance(s.proof, BySplit):
                for child in s.proof.children:
                    walk((child,), acc)
            acc = acc + ((s.id, s.goal),)

    walk(tuple(elab.statements), ())
    if not found:
        raise KeyError(target_id)
    return found[0]


def collect_obligations(elab: Elaboration) -> list[Obligation]:
    """One obligation per ByContext/BySubContext leaf, in depth-first source
    order.  ByContext leaves get their full context; BySubContext leaves get
    the hinted goals plus the lemma-local context."""
    out: list[Obligation] = []

    def emit(s: Statement, full: tuple, local: tuple | None) -> None:
        if isinstance(s.proof, ByContext):
            out.append(Obligation(s.id, full, s.goal))
        else:
            assert isinstance(s.proof, BySubContext)
            axioms: list[tuple[str, Formula]] = []
            seen: set[str] = set()
            for hid in s.proof.ids:
                if hid not in seen:
                    axioms.append((hid, elab.index[hid].goal))
                    seen.add(hid)
            for sid, g in local or ():
                if sid not in seen:
                    axioms.append((sid, g))
                    seen.add(sid)
            out.append(Obligation(s.id, tuple(axioms), s.goal))

    def walk(stmts: tuple[Statement, ...], full: tuple, local: tuple | None) -> None:
        acc_full, acc_local = full, local
        for s in stmts:
            here_local = () if s.role == "root" else acc_local
            if s.is_leaf():
                emit(s, acc_full, here_local)
            elif isinstance(s.proof, BySequence):
                walk(s.proof.children, acc_full, here_local)
            elif isinstance(s.proof, BySplit):
                for child in s.proof.children:
                    walk((child,), acc_full, here_local)
            acc_full = acc_full + ((s.id, s.goal),)
            if acc_local is not None:
                acc_local = acc_local + ((s.id, s.goal),)

    walk(tuple(elab.statements), (), None)
    return out


def leaves(elab: Elaboration) -> list[Statement]:
    out: list[Statement] = []

    def walk(s: Statement) -> None:
        if s.is_leaf():
            out.append(s)
        for c in s.children():
            walk(c)

    for s in elab.statements:
        walk(s)
    return out
