"""Finite countermodel search.

Searches domain sizes 1..max_domain.  Clauses (equality interpreted as
identity, so no equality axioms) are flattened MACE-style: every non-variable
subterm with variable arguments is extracted into a function-cell literal
``f(vars) = z``.  Flat clauses are grounded over the domain, function tables
are constrained to be total and single-valued, and a DPLL loop searches for a
propositional model.  A found model is converted to interpretation tables and
verified by direct evaluation of the original formulas before it is returned.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from threading import Event

from .. import fol
from ..fol import Formula, Not
from .clausify import EQ, Clause, Term, clause_vars, clausify

_GROUND_LIMIT = 500_000  # ground clauses per domain size


@dataclass(slots=True)
class FiniteModel:
    size: int
    preds: dict[str, set[tuple[int, ...]]] = field(default_factory=dict)
    funcs: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)

    # -- evaluation ----------------------------------------------------------

    def eval_term(self, t: fol.Term, env: dict[str, int]) -> int:
        if isinstance(t, fol.Var):
            return env[t.name]
        if isinstance(t, fol.Const):
            return self.funcs.get(t.name, {}).get((), 0)
        assert isinstance(t, fol.App)
        args = tuple(self.eval_term(a, env) for a in t.args)
        return self.funcs.get(t.symbol, {}).get(args, 0)

    def eval(self, f: Formula, env: dict[str, int] | None = None) -> bool:
        env = env or {}
        if isinstance(f, fol.Top):
            return True
        if isinstance(f, fol.Bottom):
            return False
        if isinstance(f, fol.Pred):
            args = tuple(self.eval_term(a, env) for a in f.args)
            return args in self.preds.get(f.symbol, set())
        if isinstance(f, fol.Eq):
            return self.eval_term(f.lhs, env) == self.eval_term(f.rhs, env)
        if isinstance(f, fol.Not):
            return not self.eval(f.body, env)
        if isinstance(f, fol.And):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, fol.Or):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, fol.Implies):
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        if isinstance(f, fol.Iff):
            return self.eval(f.left, env) == self.eval(f.right, env)
        if isinstance(f, fol.Forall):
            return all(self.eval(f.body, {**env, f.var: d}) for d in range(self.size))
        if isinstance(f, fol.Exists):
            return any(self.eval(f.body, {**env, f.var: d}) for d in range(self.size))
        raise TypeError(f)

    # -- rendering -------------------------------------------------------------

    def render(self) -> str:
        lines = [f"domain: {', '.join(str(i) for i in range(self.size))}"]
        for sym in sorted(self.funcs):
            table = self.funcs[sym]
            if () in table and len(table) == 1:
                lines.append(f"{sym} = {table[()]}")
            else:
                for args in sorted(table):
                    inner = ",".join(str(a) for a in args)
                    lines.append(f"{sym}({inner}) = {table[args]}")
        for sym in sorted(self.preds):
            rows = sorted(self.preds[sym])
            shown = ", ".join(
                "(" + ",".join(str(a) for a in row) + ")" if len(row) != 1
                else str(row[0])
                for row in rows
            )
            lines.append(f"{sym}: {{{shown}}}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Flattening


def _is_flat(lit) -> bool:
    s, p, args = lit
    if p != EQ:
        return all(isinstance(a, int) for a in args)
    a, b = args
    if isinstance(a, int) and isinstance(b, int):
        return True
    if isinstance(b, int) and not isinstance(a, int):
        return all(isinstance(x, int) for x in a[1:])
    if isinstance(a, int) and not isinstance(b, int):
        return all(isinstance(x, int) for x in b[1:])
    return False


def _innermost(t: Term) -> Term | None:
    """Deepest non-variable subterm whose arguments are all variables."""
    if isinstance(t, int):
        return None
    for a in t[1:]:
        r = _innermost(a)
        if r is not None:
            return r
    return t


def _extraction_candidate(lit) -> Term | None:
    s, p, args = lit
    if _is_flat(lit):
        return None
    if p != EQ:
        for a in args:
            r = _innermost(a)
            if r is not None:
                return r
        return None
    a, b = args
    for side in (a, b):
        if not isinstance(side, int):
            for arg in side[1:]:
                r = _innermost(arg)
                if r is not None:
                    return r
    # both sides have variable arguments; pull one whole side out
    if not isinstance(b, int):
        return b
    return a


def _replace(t: Term, target: Term, z: int) -> Term:
    if t == target:
        return z
    if isinstance(t, int):
        return t
    return (t[0], *(_replace(a, target, z) for a in t[1:]))


def flatten_clause(c: Clause, next_var: list[int]) -> Clause:
    lits = list(c)
    while True:
        target = None
        for lit in lits:
            target = _extraction_candidate(lit)
            if target is not None:
                break
        if target is None:
            return tuple(lits)
        z = next_var[0]
        next_var[0] += 1
        lits = [
            (s, p, tuple(_replace(a, target, z) for a in args))
            for s, p, args in lits
        ]
        lits.append((False, EQ, (target, z)))


# ---------------------------------------------------------------------------
# Grounding and DPLL


class _Budget:
    def __init__(self, deadline: float, cancel: Event | None):
        self.deadline = deadline
        self.cancel = cancel

    def exhausted(self) -> bool:
        return time.monotonic() > self.deadline or (
            self.cancel is not None and self.cancel.is_set()
        )


class _Ground:
    def __init__(self, n: int):
        self.n = n
        self.atoms: dict[tuple, int] = {}
        self.clauses: list[tuple[int, ...]] = []

    def atom(self, key: tuple) -> int:
        hit = self.atoms.get(key)
        if hit is None:
            hit = len(self.atoms) + 1
            self.atoms[key] = hit
        return hit

    def add(self, clause: list[int]) -> None:
        self.clauses.append(tuple(dict.fromkeys(clause)))


def _ground_clauses(
    flat: list[Clause], n: int, budget: _Budget
) -> _Ground | None:
    g = _Ground(n)
    funcs: dict[str, int] = {}
    for c in flat:
        for _, p, args in c:
            if p == EQ:
                for side in args:
                    if not isinstance(side, int):
                        funcs[side[0]] = len(side) - 1
    for c in flat:
        vs = sorted(clause_vars(c))
        if len(g.clauses) > _GROUND_LIMIT or budget.exhausted():
            return None
        for assignment in itertools.product(range(n), repeat=len(vs)):
            env = dict(zip(vs, assignment))
            out: list[int] = []
            satisfied = False
            for s, p, args in c:
                if p != EQ:
                    elems = tuple(env[a] for a in args)
                    lit = g.atom(("p", p, elems))
                    out.append(lit if s else -lit)
                    continue
                a, b = args
                if isinstance(a, int) and isinstance(b, int):
                    if (env[a] == env[b]) == s:
                        satisfied = True
                        break
                    continue  # literal is false, drop it
                if isinstance(a, int):
                    a, b = b, a
                # a is f(vars), b is a variable
                elems = tuple(env[x] for x in a[1:])
                cell = g.atom(("f", a[0], elems, env[b]))
                out.append(cell if s else -cell)
            if satisfied:
                continue
            g.add(out)
            if len(g.clauses) > _GROUND_LIMIT:
                return None
    # totality and functionality of every function point
    for sym, arity in sorted(funcs.items()):
        for elems in itertools.product(range(n), repeat=arity):
            cells = [g.atom(("f", sym, elems, v)) for v in range(n)]
            g.add(cells)
            for i in range(n):
                for j in range(i + 1, n):
                    g.add([-cells[i], -cells[j]])
        if budget.exhausted():
            return None
    return g


def _dpll(num_vars: int, clauses: list[tuple[int, ...]], budget: _Budget) -> list[bool] | None:
    """Iterative DPLL with unit propagation; returns a full assignment."""
    assign: list[int] = [0] * (num_vars + 1)  # 0 unknown, 1 true, -1 false
    occur: list[list[int]] = [[] for _ in range(num_vars + 1)]
    for ci, c in enumerate(clauses):
        for lit in c:
            occur[abs(lit)].append(ci)
    trail: list[int] = []
    decisions: list[list] = []  # [var, trail length before, flipped?]
    steps = 0

    def value(lit: int) -> int:
        v = assign[abs(lit)]
        return v if lit > 0 else -v

    def assign_lit(lit: int) -> None:
        assign[abs(lit)] = 1 if lit > 0 else -1
        trail.append(lit)

    def propagate(start: int) -> bool:
        qi = start
        while qi < len(trail):
            var = abs(trail[qi])
            qi += 1
            for ci in occur[var]:
                clause = clauses[ci]
                unit = None
                sat = False
                free = 0
                for lit in clause:
                    v = value(lit)
                    if v > 0:
                        sat = True
                        break
                    if v == 0:
                        free += 1
                        if free > 1:
                            break
                        unit = lit
                if sat or free > 1:
                    continue
                if free == 0:
                    return False
                assign_lit(unit)
        return True

    for c in clauses:
        if len(c) == 1:
            if value(c[0]) < 0:
                return None
            if value(c[0]) == 0:
                assign_lit(c[0])
        elif len(c) == 0:
            return None
    if not propagate(0):
        return None

    def pick_literal() -> int | None:
        """A literal from the shortest unsatisfied clause (branching on what
        the constraints care about avoids chronological-backtracking
        thrash); None when every clause is satisfied."""
        best_lit, best_free = None, None
        for clause in clauses:
            lit0 = None
            sat = False
            free = 0
            for lit in clause:
                v = value(lit)
                if v > 0:
                    sat = True
                    break
                if v == 0:
                    free += 1
                    if lit0 is None:
                        lit0 = lit
            if sat or lit0 is None:
                continue
            if best_free is None or free < best_free:
                best_lit, best_free = lit0, free
                if free == 2:
                    break
        return best_lit

    while True:
        steps += 1
        if steps % 256 == 0 and budget.exhausted():
            return None
        lit = pick_literal()
        if lit is None:
            # all clauses satisfied: any completion works
            return [assign[v] > 0 for v in range(num_vars + 1)]
        decisions.append([lit, len(trail), False])
        assign_lit(lit)  # satisfy the clause first
        start = len(trail) - 1
        while not propagate(start):
            backtracked = False
            while decisions:
                dlit, dlen, flipped = decisions[-1]
                for lit in trail[dlen:]:
                    assign[abs(lit)] = 0
                del trail[dlen:]
                if flipped:
                    decisions.pop()
                    continue
                decisions[-1][2] = True
                assign_lit(-dlit)
                start = len(trail) - 1
                backtracked = True
                break
            if not backtracked:
                return None


def find_model(
    axioms: list[Formula],
    conjecture: Formula | None,
    max_domain: int = 4,
    max_seconds: float = 10.0,
    cancel: Event | None = None,
) -> FiniteModel | None:
    """A finite model of the axioms falsifying the conjecture, or None."""
    budget = _Budget(time.monotonic() + max_seconds, cancel)
    formulas = list(axioms)
    if conjecture is not None:
        formulas.append(Not(conjecture))
    clauses = clausify(formulas, with_equality_axioms=False)
    next_var = [max((max(clause_vars(c), default=-1) for c in clauses), default=-1) + 1]
    flat = [flatten_clause(c, next_var) for c in clauses]

    for n in range(1, max_domain + 1):
        if budget.exhausted():
            return None
        g = _ground_clauses(flat, n, budget)
        if g is None:
            continue
        result = _dpll(len(g.atoms), g.clauses, budget)
        if result is None:
            continue
        model = _extract(g, n, result)
        for f in formulas:
            if not model.eval(f):
                raise RuntimeError(
                    "model finder produced an invalid model; this is a bug"
                )
        return model
    return None


def _extract(g: _Ground, n: int, assign: list[bool]) -> FiniteModel:
    model = FiniteModel(n)
    for key, var in g.atoms.items():
        if key[0] == "p":
            _, sym, elems = key
            if assign[var]:
                model.preds.setdefault(sym, set()).add(elems)
            else:
                model.preds.setdefault(sym, set())
        else:
            _, sym, elems, val = key
            table = model.funcs.setdefault(sym, {})
            if assign[var]:
                table[elems] = val
    return model
