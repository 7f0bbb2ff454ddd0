"""Saturation prover: given-clause loop with binary resolution, factoring,
and forward subsumption.

Inferences use negative-literal selection (positive hyperresolution style):
a clause containing negative literals resolves only on its first negative
literal, and only against all-positive partners; all-positive clauses
resolve on any of their literals against selected ones.  With positive
factoring this calculus is refutation complete, and it keeps the equality
axioms from saturating freely: equations are chained forward from facts
instead of guessing transitivity midpoints.

Clause selection is smallest-weight-first with creation order as the tie
break, so runs are deterministic.  The prover is sound unconditionally:
Theorem is only reported after deriving the empty clause from the clausified
axioms plus negated conjecture.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from threading import Event

from ..fol import Formula, Not
from ..tptp import THEOREM, UNKNOWN
from .clausify import (
    EQ,
    Clause,
    Term,
    canonical,
    clause_vars,
    clause_weight,
    clausify,
    literal_weight,
    rename_clause,
)
from .congruence import CongruenceClosure


@dataclass(frozen=True, slots=True)
class ResolutionLimits:
    max_seconds: float = 10.0
    max_clauses: int = 50_000
    max_literals: int = 24  # longer resolvents are discarded (still sound)
    age_ratio: int = 5  # every n-th given clause is the oldest, not lightest


# ---------------------------------------------------------------------------
# Unification and matching


def _walk(t: Term, subst: dict[int, Term]) -> Term:
    while isinstance(t, int) and t in subst:
        t = subst[t]
    return t


def _occurs(v: int, t: Term, subst: dict[int, Term]) -> bool:
    t = _walk(t, subst)
    if isinstance(t, int):
        return t == v
    return any(_occurs(v, a, subst) for a in t[1:])


def unify(a: Term, b: Term, subst: dict[int, Term]) -> bool:
    """Extend `subst` to a unifier of a and b; False if none exists."""
    a, b = _walk(a, subst), _walk(b, subst)
    if a == b:
        return True
    if isinstance(a, int):
        if _occurs(a, b, subst):
            return False
        subst[a] = b
        return True
    if isinstance(b, int):
        if _occurs(b, a, subst):
            return False
        subst[b] = a
        return True
    if a[0] != b[0] or len(a) != len(b):
        return False
    return all(unify(x, y, subst) for x, y in zip(a[1:], b[1:]))


def unify_args(xs: tuple, ys: tuple, subst: dict[int, Term]) -> bool:
    if len(xs) != len(ys):
        return False
    return all(unify(x, y, subst) for x, y in zip(xs, ys))


def apply_subst(t: Term, subst: dict[int, Term]) -> Term:
    t = _walk(t, subst)
    if isinstance(t, int):
        return t
    return (t[0], *(apply_subst(a, subst) for a in t[1:]))


def subst_clause(c: Clause, subst: dict[int, Term]) -> Clause:
    return tuple((s, p, tuple(apply_subst(a, subst) for a in args)) for s, p, args in c)


def _match(pat: Term, t: Term, subst: dict[int, Term]) -> bool:
    """One-way matching: variables of `pat` bind to subterms of `t`."""
    if isinstance(pat, int):
        bound = subst.get(pat)
        if bound is None:
            subst[pat] = t
            return True
        return bound == t
    if isinstance(t, int):
        return False
    if pat[0] != t[0] or len(pat) != len(t):
        return False
    return all(_match(x, y, subst) for x, y in zip(pat[1:], t[1:]))


def subsumes(c: Clause, d: Clause) -> bool:
    """True if some instance of c is a sub-multiset of d."""
    if len(c) > len(d):
        return False

    def backtrack(i: int, subst: dict[int, Term], used: set[int]) -> bool:
        if i == len(c):
            return True
        s, p, args = c[i]
        for j, (s2, p2, args2) in enumerate(d):
            if j in used or s2 != s or p2 != p or len(args2) != len(args):
                continue
            trial = dict(subst)
            if all(_match(x, y, trial) for x, y in zip(args, args2)):
                if backtrack(i + 1, trial, used | {j}):
                    return True
        return False

    return backtrack(0, {}, set())


# ---------------------------------------------------------------------------
# Given-clause saturation


def _is_eq_theory(c: Clause) -> bool:
    """Recognize the clausified equality axioms: symmetry, transitivity, and
    per-argument congruence.  Their inferences with ground equations are
    redundant once the congruence closure emits derived ground equations."""
    if not (2 <= len(c) <= 3):
        return False
    neg_eq = [l for l in c if not l[0] and l[1] == EQ
              and isinstance(l[2][0], int) and isinstance(l[2][1], int)]
    if not neg_eq:
        return False
    for s, p, args in c:
        for a in args:
            if not isinstance(a, int):
                if not all(isinstance(x, int) for x in a[1:]):
                    return False
    preds = {p for _, p, _ in c}
    if preds == {EQ}:
        return True
    other = preds - {EQ}
    if len(other) != 1:
        return False
    # pred congruence: ~p(..) | ~=(x,y) | p(..)
    signs = sorted(s for s, p, _ in c if p != EQ)
    return signs == [False, True]


def _is_tautology(c: Clause) -> bool:
    atoms = {(p, args) for s, p, args in c if s}
    for s, p, args in c:
        if not s and (p, args) in atoms:
            return True
        if s and p == EQ and args[0] == args[1]:
            return True
    return False


def _selected(c: Clause) -> int | None:
    """Index of the heaviest negative literal (leftmost on ties), None for
    all-positive clauses.  Heavier literals are more instantiated, so
    resolving on them branches less."""
    best: int | None = None
    best_w = -1
    for i, lit in enumerate(c):
        if not lit[0]:
            w = literal_weight(lit)
            if w > best_w:
                best, best_w = i, w
    return best


def _is_ground(t: Term) -> bool:
    if isinstance(t, int):
        return False
    return all(_is_ground(a) for a in t[1:])


def _term_depth(t: Term) -> int:
    if isinstance(t, int):
        return 1
    if len(t) == 1:
        return 1
    return 1 + max(_term_depth(a) for a in t[1:])


def _clause_depth(c: Clause) -> int:
    return max((_term_depth(a) for _, _, args in c for a in args), default=1)


def _lit_ground(lit) -> bool:
    return all(_is_ground(a) for a in lit[2])


class _Saturation:
    def __init__(self, clauses: list[Clause], limits: ResolutionLimits,
                 cancel: Event | None):
        self.limits = limits
        self.cancel = cancel
        self.deadline = time.monotonic() + limits.max_seconds
        # resolvents nesting deeper than the input (with a small floor) are
        # congruence junk for this calculus; discarding them is sound
        self.max_depth = max(4, max((_clause_depth(c) for c in clauses), default=1))
        self.passive: list[tuple[int, int, Clause]] = []
        self.by_age: list[tuple[int, Clause]] = []
        self.popped: set[int] = set()
        self.active: list[Clause] = []
        # all-positive clauses, indexed per positive literal predicate
        self.electrons: dict[str, list[tuple[int, int]]] = {}
        # clauses with a selected negative literal, indexed by its predicate
        self.nuclei: dict[str, list[tuple[int, int]]] = {}
        # every positive literal of every active clause (for unit attacks)
        self.positives: dict[str, list[tuple[int, int]]] = {}
        # active negative ground units, the goal-directed instantiators
        self.neg_ground: dict[str, list[tuple[int, int]]] = {}
        self.eq_theory: set[int] = set()
        self.units: dict[tuple[str, bool], list[tuple]] = {}
        self.subsumption_buckets: dict[str | None, list[int]] = {}
        self.seen: set[Clause] = set()
        self.generated = 0
        self.ticket = itertools.count()
        self.cc = CongruenceClosure()
        for c in clauses:
            self.push(c)

    # -- queue ----------------------------------------------------------------

    def push(self, c: Clause) -> bool:
        """Queue a clause; True when it is the empty clause."""
        c = self.unit_deleted(c)
        simplified = self.cc_simplified(c)
        if simplified is None:
            return False
        return self.push_raw(simplified)

    def push_raw(self, c: Clause) -> bool:
        if len(c) > self.limits.max_literals:
            return False
        if _is_tautology(c):
            return False
        if _clause_depth(c) > self.max_depth:
            return False
        key = canonical(c)
        if key in self.seen:
            return False
        self.seen.add(key)
        self.generated += 1
        ticket = next(self.ticket)
        heapq.heappush(self.passive, (clause_weight(c), ticket, c))
        heapq.heappush(self.by_age, (ticket, c))
        return len(c) == 0

    def unit_deleted(self, c: Clause) -> Clause:
        """Drop literals whose complement is an instance of a known unit."""
        if not self.units:
            return c
        out = []
        for lit in c:
            s, p, args = lit
            deleted = False
            for uargs in self.units.get((p, not s), ()):
                subst: dict[int, Term] = {}
                if len(uargs) == len(args) and all(
                    _match(x, y, subst) for x, y in zip(uargs, args)
                ):
                    deleted = True
                    break
            if not deleted:
                out.append(lit)
        return tuple(out)

    def cc_simplified(self, c: Clause) -> Clause | None:
        """Evaluate ground literals against the congruence closure: a true
        literal makes a multi-literal clause redundant (implied by active
        units), a false literal is dropped.  Unit clauses are kept when true
        (they materialize closure facts for resolution) and become the empty
        clause when false.  Returns None for redundant clauses."""
        unit = len(c) == 1
        out = []
        for lit in c:
            s, p, args = lit
            if not _lit_ground(lit):
                out.append(lit)
                continue
            if p == EQ:
                holds = self.cc.eq_holds(args[0], args[1])
                if holds:
                    if s:
                        if unit:
                            out.append(lit)  # keep the materialized fact
                            continue
                        return None
                    continue  # false literal dropped
                out.append(lit)
            else:
                val = self.cc.atom_value(p, args)
                if val is None:
                    out.append(lit)
                elif val == s:
                    if unit:
                        out.append(lit)
                        continue
                    return None
                # else: literal false, dropped
        return tuple(out)

    def assert_unit(self, lit) -> None:
        s, p, args = lit
        if not _lit_ground(lit):
            return
        if p == EQ:
            if s:
                self.cc.assert_eq(args[0], args[1])
            else:
                self.cc.assert_diseq(args[0], args[1])
        else:
            self.cc.assert_atom(s, p, args)

    def activate(self, c: Clause) -> None:
        idx = len(self.active)
        self.active.append(c)
        sel = _selected(c)
        if sel is None:
            for li, (_, p, _) in enumerate(c):
                self.electrons.setdefault(p, []).append((idx, li))
        else:
            self.nuclei.setdefault(c[sel][1], []).append((idx, sel))
        for li, (ls, p, _) in enumerate(c):
            if ls:
                self.positives.setdefault(p, []).append((idx, li))
        if len(c) == 1 and not c[0][0] and _lit_ground(c[0]):
            self.neg_ground.setdefault(c[0][1], []).append((idx, 0))
        if _is_eq_theory(c):
            self.eq_theory.add(idx)
        if len(c) == 1:
            s, p, args = c[0]
            self.units.setdefault((p, s), []).append(args)
            if p == EQ and s:
                # index the symmetric orientation as well
                self.units[(p, s)].append((args[1], args[0]))
            self.assert_unit(c[0])
        self.subsumption_buckets.setdefault(self._bucket(c), []).append(idx)

    @staticmethod
    def _bucket(c: Clause) -> str | None:
        # cheap prefilter key: subsuming clauses must share their first
        # literal's predicate with some literal of the candidate
        return c[0][1] if c else None

    def forward_subsumed(self, given: Clause) -> bool:
        preds = {p for _, p, _ in given}
        n = len(given)
        for p in preds | {None}:
            for idx in self.subsumption_buckets.get(p, ()):
                a = self.active[idx]
                if len(a) <= n and subsumes(a, given):
                    return True
        return False

    def out_of_budget(self) -> bool:
        if self.generated > self.limits.max_clauses:
            return True
        if time.monotonic() > self.deadline:
            return True
        return self.cancel is not None and self.cancel.is_set()

    # -- main loop ---------------------------------------------------------------

    def run(self) -> str:
        if any(len(c) == 0 for _, _, c in self.passive):
            return THEOREM
        steps = 0
        while True:
            if self.cc.contradiction:
                return THEOREM
            if self.drain_cc_merges():
                return THEOREM
            if not self.passive:
                return UNKNOWN
            steps += 1
            if steps % 16 == 0 and self.out_of_budget():
                return UNKNOWN
            given = self.pop_given(steps)
            if given is None:
                continue  # tombstoned entries only; emissions may refill
            if self.forward_subsumed(given):
                continue
            simplified = self.cc_simplified(given)
            if simplified is None:
                continue
            if simplified != given:
                if self.push(simplified):
                    return THEOREM
                continue
            for fac in self.factors(given):
                if self.push(fac):
                    return THEOREM
            for resolvent in self.resolvents(given):
                if self.push(resolvent):
                    return THEOREM
                if self.generated > self.limits.max_clauses:
                    return UNKNOWN
            self.activate(given)

    def drain_cc_merges(self) -> bool:
        """Materialize facts the congruence closure derived, so lifted
        clauses can resolve against them."""
        while self.cc.emissions:
            entry = self.cc.emissions.pop()
            # bypass cc_simplified: these units are CC-entailed by definition
            if entry[0] == "eq":
                a, b = entry[1], entry[2]
                if self.push_raw(((True, EQ, (a, b)),)):
                    return True
                if self.push_raw(((True, EQ, (b, a)),)):
                    return True
            else:
                _, sign, pred, args = entry
                if self.push_raw(((sign, pred, args),)):
                    return True
        return False

    def pop_given(self, steps: int) -> Clause | None:
        """Lightest clause, except every `age_ratio`-th pick takes the oldest
        so heavy input clauses are never starved."""
        by_age_turn = self.limits.age_ratio > 0 and steps % self.limits.age_ratio == 0
        while True:
            if by_age_turn:
                if not self.by_age:
                    by_age_turn = False
                    continue
                ticket, c = heapq.heappop(self.by_age)
            else:
                if not self.passive:
                    return None
                _, ticket, c = heapq.heappop(self.passive)
            if ticket in self.popped:
                continue
            self.popped.add(ticket)
            return c

    def factors(self, c: Clause) -> list[Clause]:
        out = []
        for i in range(len(c)):
            s1, p1, a1 = c[i]
            for j in range(i + 1, len(c)):
                s2, p2, a2 = c[j]
                if s1 != s2 or p1 != p2 or len(a1) != len(a2):
                    continue
                subst: dict[int, Term] = {}
                if unify_args(a1, a2, subst):
                    fac = tuple(
                        dict.fromkeys(
                            subst_clause(
                                tuple(l for k, l in enumerate(c) if k != j), subst
                            )
                        )
                    )
                    out.append(fac)
        return out

    def _resolve_pair(
        self, neg_clause: Clause, ni: int, pos_clause: Clause, pi: int,
        out: list[Clause],
    ) -> None:
        subst: dict[int, Term] = {}
        if not unify_args(neg_clause[ni][2], pos_clause[pi][2], subst):
            return
        merged = tuple(l for k, l in enumerate(neg_clause) if k != ni) + tuple(
            l for k, l in enumerate(pos_clause) if k != pi
        )
        out.append(tuple(dict.fromkeys(subst_clause(merged, subst))))

    def resolvents(self, given: Clause) -> list[Clause]:
        out: list[Clause] = []
        gmax = max(clause_vars(given), default=-1)
        sel = _selected(given)
        given_eq_theory = _is_eq_theory(given)
        if sel is not None:
            # nucleus: selected negative literal against active electrons
            p = given[sel][1]
            for ci, li in self.electrons.get(p, ()):
                partner = self.active[ci]
                if given_eq_theory and p == EQ and _lit_ground(partner[li]):
                    continue  # ground equational closure is the CC's job
                partner = rename_clause(partner, gmax + 1)
                self._resolve_pair(given, sel, partner, li, out)
        else:
            # electron: any literal against the selected literal of a nucleus
            for gi, (gs, p, _) in enumerate(given):
                ground_eq = p == EQ and _lit_ground(given[gi])
                for ci, li in self.nuclei.get(p, ()):
                    if ground_eq and ci in self.eq_theory:
                        continue
                    partner = rename_clause(self.active[ci], gmax + 1)
                    self._resolve_pair(partner, li, given, gi, out)
        # goal-directed unit attacks: a negative ground unit may meet the
        # positive literals of any clause (adding inferences is harmless for
        # completeness, and this lets goals instantiate definitions top-down)
        if len(given) == 1 and not given[0][0] and _lit_ground(given[0]):
            p = given[0][1]
            for ci, li in self.positives.get(p, ()):
                partner = rename_clause(self.active[ci], gmax + 1)
                self._resolve_pair(given, 0, partner, li, out)
        for gi, (ls, p, _) in enumerate(given):
            if not ls:
                continue
            for ci, li in self.neg_ground.get(p, ()):
                partner = self.active[ci]  # ground: no renaming needed
                self._resolve_pair(partner, li, given, gi, out)
        return out


def resolution_prove(
    axioms: list[Formula],
    conjecture: Formula,
    limits: ResolutionLimits | None = None,
    cancel: Event | None = None,
) -> str:
    """Theorem iff the empty clause is derived from axioms + negated
    conjecture within the limits; Unknown otherwise."""
    limits = limits or ResolutionLimits()
    clauses = clausify(list(axioms) + [Not(conjecture)])
    return _Saturation(clauses, limits, cancel).run()


def saturate_clauses(
    clauses: list[Clause],
    limits: ResolutionLimits | None = None,
    cancel: Event | None = None,
) -> str:
    """Saturation entry point for already clausified input (used by tests)."""
    limits = limits or ResolutionLimits()
    return _Saturation(clauses, limits, cancel).run()
