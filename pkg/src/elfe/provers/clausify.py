"""Clause normal form.

Formulas are rewritten to negation normal form, skolemized (fresh
"sk"-prefixed symbols closed over the universal scope), and distributed into
CNF.  When equality occurs anywhere in the input, the equality theory is
appended: reflexivity, symmetry, transitivity, and one congruence clause per
argument position of every function and predicate symbol.

Clause representation is tuple-based for speed:

* a variable is an ``int``
* a non-variable term is ``(symbol, arg, ...)`` — constants are 1-tuples
* a literal is ``(sign, predicate_symbol, args_tuple)``; equality uses the
  predicate symbol ``"="``
* a clause is a tuple of literals
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import fol
from ..fol import (
    And,
    App,
    Bottom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Pred,
    Term as FolTerm,
    Top,
    Var,
)

Term = int | tuple
Literal = tuple[bool, str, tuple]
Clause = tuple[Literal, ...]

EQ = "="


def term_is_var(t: Term) -> bool:
    return isinstance(t, int)


def term_vars(t: Term) -> set[int]:
    if isinstance(t, int):
        return {t}
    out: set[int] = set()
    for a in t[1:]:
        out |= term_vars(a)
    return out


def clause_vars(c: Clause) -> set[int]:
    out: set[int] = set()
    for _, _, args in c:
        for a in args:
            out |= term_vars(a)
    return out


def literal_weight(lit: Literal) -> int:
    def w(t: Term) -> int:
        if isinstance(t, int):
            return 1
        return 1 + sum(w(a) for a in t[1:])

    return 1 + sum(w(a) for a in lit[2])


def clause_weight(c: Clause) -> int:
    return sum(literal_weight(l) for l in c)


def rename_clause(c: Clause, offset: int) -> Clause:
    def r(t: Term) -> Term:
        if isinstance(t, int):
            return t + offset
        return (t[0], *(r(a) for a in t[1:]))

    return tuple((s, p, tuple(r(a) for a in args)) for s, p, args in c)


def canonical(c: Clause) -> Clause:
    """Normalize variable numbering (and literal order) so syntactically
    equal-up-to-renaming clauses compare equal."""
    ordered = sorted(c, key=_lit_key)
    mapping: dict[int, int] = {}

    def r(t: Term) -> Term:
        if isinstance(t, int):
            if t not in mapping:
                mapping[t] = len(mapping)
            return mapping[t]
        return (t[0], *(r(a) for a in t[1:]))

    return tuple((s, p, tuple(r(a) for a in args)) for s, p, args in ordered)


def _lit_key(lit: Literal):
    def tkey(t: Term):
        if isinstance(t, int):
            return ("v",)
        return (t[0], tuple(tkey(a) for a in t[1:]))

    return (lit[1], lit[0], tuple(tkey(a) for a in lit[2]))


# ---------------------------------------------------------------------------
# Transformation


@dataclass
class _State:
    counter: int = 0
    sk_counter: int = 0
    symbols: dict[str, int] = field(default_factory=dict)  # functions: name -> arity
    preds: dict[str, int] = field(default_factory=dict)
    has_eq: bool = False

    def fresh_var(self) -> int:
        self.counter += 1
        return self.counter - 1

    def fresh_skolem(self) -> str:
        self.sk_counter += 1
        return f"sk{self.sk_counter - 1}"


def _nnf(f: Formula, pos: bool) -> Formula:
    if isinstance(f, Not):
        return _nnf(f.body, not pos)
    if isinstance(f, And):
        cls = And if pos else Or
        return cls(_nnf(f.left, pos), _nnf(f.right, pos))
    if isinstance(f, Or):
        cls = Or if pos else And
        return cls(_nnf(f.left, pos), _nnf(f.right, pos))
    if isinstance(f, Implies):
        if pos:
            return Or(_nnf(f.left, False), _nnf(f.right, True))
        return And(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Iff):
        expanded = And(Implies(f.left, f.right), Implies(f.right, f.left))
        return _nnf(expanded, pos)
    if isinstance(f, Forall):
        cls = Forall if pos else Exists
        return cls(f.var, _nnf(f.body, pos))
    if isinstance(f, Exists):
        cls = Exists if pos else Forall
        return cls(f.var, _nnf(f.body, pos))
    if isinstance(f, Top):
        return Top() if pos else Bottom()
    if isinstance(f, Bottom):
        return Bottom() if pos else Top()
    return f if pos else Not(f)


def _term(t: FolTerm, env: dict[str, Term], st: _State) -> Term:
    if isinstance(t, Var):
        if t.name not in env:
            raise ValueError(f"unbound variable {t.name!r} in clausifier input")
        return env[t.name]
    if isinstance(t, Const):
        st.symbols.setdefault(t.name, 0)
        return (t.name,)
    assert isinstance(t, App)
    st.symbols.setdefault(t.symbol, len(t.args))
    return (t.symbol, *(_term(a, env, st) for a in t.args))


def _clausify_nnf(
    f: Formula, env: dict[str, Term], univ: tuple[Term, ...], st: _State
) -> list[list[Literal]]:
    """NNF formula -> list of clauses (lists of literals)."""
    if isinstance(f, Top):
        return []
    if isinstance(f, Bottom):
        return [[]]
    if isinstance(f, And):
        return _clausify_nnf(f.left, env, univ, st) + _clausify_nnf(f.right, env, univ, st)
    if isinstance(f, Or):
        left = _clausify_nnf(f.left, env, univ, st)
        right = _clausify_nnf(f.right, env, univ, st)
        return [lc + rc for lc in left for rc in right]
    if isinstance(f, Forall):
        v = st.fresh_var()
        return _clausify_nnf(f.body, {**env, f.var: v}, univ + (v,), st)
    if isinstance(f, Exists):
        sk = st.fresh_skolem()
        st.symbols[sk] = len(univ)
        skt: Term = (sk, *univ)
        return _clausify_nnf(f.body, {**env, f.var: skt}, univ, st)
    if isinstance(f, Not):
        lit = _literal(f.body, env, st, False)
        return [[lit]]
    lit = _literal(f, env, st, True)
    return [[lit]]


def _literal(f: Formula, env: dict[str, Term], st: _State, sign: bool) -> Literal:
    if isinstance(f, Eq):
        st.has_eq = True
        return (sign, EQ, (_term(f.lhs, env, st), _term(f.rhs, env, st)))
    if isinstance(f, Pred):
        st.preds[f.symbol] = len(f.args)
        return (sign, f.symbol, tuple(_term(a, env, st) for a in f.args))
    raise ValueError(f"not a literal: {f!r}")


def _simplify(clauses: list[list[Literal]]) -> list[Clause]:
    out: list[Clause] = []
    seen: set[Clause] = set()
    for c in clauses:
        lits = tuple(dict.fromkeys(c))  # dedupe, keep order
        if _is_tautology(lits):
            continue
        key = canonical(lits)
        if key in seen:
            continue
        seen.add(key)
        out.append(lits)
    return out


def _is_tautology(c: Clause) -> bool:
    atoms = {(p, args) for s, p, args in c if s}
    for s, p, args in c:
        if not s and (p, args) in atoms:
            return True
        if s and p == EQ and args[0] == args[1]:
            return True
    return False


def equality_axioms(
    funcs: dict[str, int], preds: dict[str, int], st: _State
) -> list[Clause]:
    """Reflexivity, symmetry, transitivity, and per-argument congruence."""
    out: list[Clause] = []
    x, y, z = st.fresh_var(), st.fresh_var(), st.fresh_var()
    out.append(((True, EQ, (x, x)),))
    out.append(((False, EQ, (x, y)), (True, EQ, (y, x))))
    out.append(((False, EQ, (x, y)), (False, EQ, (y, z)), (True, EQ, (x, z))))
    for sym, arity in sorted(funcs.items()):
        for i in range(arity):
            args = [st.fresh_var() for _ in range(arity)]
            fresh = st.fresh_var()
            lhs: Term = (sym, *args)
            rhs: Term = (sym, *(fresh if j == i else a for j, a in enumerate(args)))
            out.append(((False, EQ, (args[i], fresh)), (True, EQ, (lhs, rhs))))
    for sym, arity in sorted(preds.items()):
        if sym == EQ:
            continue
        for i in range(arity):
            args = [st.fresh_var() for _ in range(arity)]
            fresh = st.fresh_var()
            other = tuple(fresh if j == i else a for j, a in enumerate(args))
            out.append(
                (
                    (False, sym, tuple(args)),
                    (False, EQ, (args[i], fresh)),
                    (True, sym, other),
                )
            )
    return out


def _clausify_into(formulas: list[Formula], st: _State) -> list[Clause]:
    raw: list[list[Literal]] = []
    for f in formulas:
        if fol.free_vars(f):
            raise ValueError(f"clausifier input must be closed: {fol.render(f)}")
        nnf = _nnf(f, True)
        raw.extend(_clausify_nnf(nnf, {}, (), st))
    return _simplify(raw)


def clausify(
    formulas: list[Formula], with_equality_axioms: bool = True
) -> list[Clause]:
    """CNF of closed `formulas`; equality axioms appended whenever "="
    occurs (disable for interpreted-equality consumers like the finite
    model finder)."""
    st = _State()
    clauses = _clausify_into(formulas, st)
    if st.has_eq and with_equality_axioms:
        clauses.extend(equality_axioms(dict(st.symbols), dict(st.preds), st))
    return clauses


def clausify_split(
    axioms: list[Formula], negated_conjecture: Formula
) -> tuple[list[Clause], list[Clause]]:
    """Clausify axioms and the (already negated) conjecture with one shared
    skolem namespace, returning (axiom clauses + equality theory, goal
    clauses).  The split feeds the prover's set-of-support strategy."""
    st = _State()
    ax = _clausify_into(axioms, st)
    goal = _clausify_into([negated_conjecture], st)
    if st.has_eq:
        ax.extend(equality_axioms(dict(st.symbols), dict(st.preds), st))
    return ax, goal


def clause_symbols(clauses: list[Clause]) -> tuple[dict[str, int], dict[str, int]]:
    """(functions, predicates) with arities, as they occur in `clauses`."""
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}

    def walk(t: Term) -> None:
        if isinstance(t, int):
            return
        funcs[t[0]] = len(t) - 1
        for a in t[1:]:
            walk(a)

    for c in clauses:
        for _, p, args in c:
            if p != EQ:
                preds[p] = len(args)
            for a in args:
                walk(a)
    return funcs, preds
