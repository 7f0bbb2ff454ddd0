"""First-order terms and formulas.

Immutable syntax trees for everything the desugarer produces: substitution,
free-variable accounting, freezing of universally quantified meta-variables
into fresh constants, universal closure, and a deterministic re-parseable
printer.  Guarded quantification ``forall set(A). phi`` is display sugar for
``forall A. set(A) -> phi`` (dually with "and" for exists); the printer emits
the guarded form and :func:`parse` folds it back, so round-tripping is
structural identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str

    def __repr__(self) -> str:
        return f"Const({self.name})"


@dataclass(frozen=True, slots=True)
class App(Term):
    symbol: str
    args: tuple[Term, ...]

    def __repr__(self) -> str:
        return f"App({self.symbol}, {list(self.args)})"


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Pred(Formula):
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)

# Mapping recorded by freeze(): original variable name -> fresh constant name.
FreezeMap = dict


def conj(parts: list[Formula]) -> Formula:
    """Right-nested conjunction of `parts` (Top for the empty list)."""
    if not parts:
        return Top()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a conjunction tree into its leaves."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


# ---------------------------------------------------------------------------
# Traversal helpers


def term_vars(t: Term) -> list[str]:
    """Variable names in `t`, in first-occurrence order."""
    out: list[str] = []

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            if u.name not in out:
                out.append(u.name)
        elif isinstance(u, App):
            for a in u.args:
                walk(a)

    walk(t)
    return out


def free_vars(f: Formula) -> list[str]:
    """Free variable names of `f`, in first-occurrence order."""
    out: list[str] = []

    def walk_term(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out.append(t.name)
        elif isinstance(t, App):
            for a in t.args:
                walk_term(a, bound)

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Pred):
            for a in g.args:
                walk_term(a, bound)
        elif isinstance(g, Eq):
            walk_term(g.lhs, bound)
            walk_term(g.rhs, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, BINARY):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return out


def symbols(f: Formula) -> set[str]:
    """Every identifier occurring in `f`: predicate/function symbols,
    constants, and variable names (free or bound)."""
    out: set[str] = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, (Var, Const)):
            out.add(t.name)
        elif isinstance(t, App):
            out.add(t.symbol)
            for a in t.args:
                walk_term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Pred):
            out.add(g.symbol)
            for a in g.args:
                walk_term(a)
        elif isinstance(g, Eq):
            walk_term(g.lhs)
            walk_term(g.rhs)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, BINARY):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, QUANTIFIERS):
            out.add(g.var)
            walk(g.body)

    walk(f)
    return out


def map_terms(f: Formula, fn) -> Formula:
    """Rebuild `f` with `fn` applied to every top-level term."""
    if isinstance(f, Pred):
        return Pred(f.symbol, tuple(fn(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(fn(f.lhs), fn(f.rhs))
    if isinstance(f, Not):
        return Not(map_terms(f.body, fn))
    if isinstance(f, BINARY):
        return type(f)(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, map_terms(f.body, fn))
    return f


# ---------------------------------------------------------------------------
# Substitution


def substitute_term(t: Term, var: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == var else t
    if isinstance(t, App):
        return App(t.symbol, tuple(substitute_term(a, var, repl) for a in t.args))
    return t


def substitute(f: Formula, var: str, repl: Term) -> Formula:
    """Replace every free occurrence of `var` in `f` by `repl`.

    Binders capturing a variable of `repl` are renamed first (name + numeric
    suffix starting at 0), so substitution never captures.
    """
    repl_vars = set(term_vars(repl))

    def walk(g: Formula) -> Formula:
        if isinstance(g, QUANTIFIERS):
            if g.var == var:
                return g  # occurrence is bound below here
            if g.var in repl_vars and var in free_vars(g.body):
                fresh = _fresh_name(g.var, symbols(g.body) | repl_vars | {var})
                body = substitute(g.body, g.var, Var(fresh))
                return type(g)(fresh, walk(body))
            return type(g)(g.var, walk(g.body))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, BINARY):
            return type(g)(walk(g.left), walk(g.right))
        return map_terms(g, lambda t: substitute_term(t, var, repl))

    return walk(f)


def _fresh_name(base: str, taken: set[str]) -> str:
    n = 0
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def substitute_all(f: Formula, mapping: dict[str, Term]) -> Formula:
    for var, repl in mapping.items():
        f = substitute(f, var, repl)
    return f


# ---------------------------------------------------------------------------
# Quantifier prefix, freezing, closure


@dataclass(frozen=True, slots=True)
class Binder:
    """One entry of an outermost universal prefix.

    `guard` is set when the binder was written in guarded form, i.e. the
    quantifier body is `guard -> rest` with the guard mentioning the bound
    variable.
    """

    var: str
    guard: Formula | None


def forall_prefix(f: Formula) -> tuple[list[Binder], Formula]:
    """Split `f` into its outermost universal prefix (guards included) and
    the remaining core."""
    binders: list[Binder] = []
    while isinstance(f, Forall):
        body = f.body
        if (
            isinstance(body, Implies)
            and isinstance(body.left, Pred)
            and f.var in free_vars(body.left)
        ):
            binders.append(Binder(f.var, body.left))
            f = body.right
        else:
            binders.append(Binder(f.var, None))
            f = body
    return binders, f


def freeze(f: Formula, vars: list[str]) -> tuple[Formula, FreezeMap]:
    """Remove the outermost universal quantifiers for `vars`, replacing each
    variable with a fresh "c"-prefixed constant absent from `f`.

    Guards of the frozen binders are collected into a single implication
    antecedent.  Raises ValueError if some requested variable is not among
    the outermost universally quantified ones.
    """
    binders, core = forall_prefix(f)
    prefix_vars = [b.var for b in binders]
    for v in vars:
        if v not in prefix_vars:
            raise ValueError(f"cannot freeze {v!r}: not outermost-universal")
    if not vars:
        return f, {}
    # Only a prefix segment may be frozen, otherwise inner binders would
    # escape their scope.
    depth = max(prefix_vars.index(v) for v in vars) + 1
    segment = binders[:depth]
    for b in segment:
        if b.var not in vars:
            raise ValueError(
                f"cannot freeze past {b.var!r}: freeze set must be a prefix"
            )
    rest = _rebuild_prefix(binders[depth:], core)

    taken = symbols(f)
    fmap: FreezeMap = {}
    for b in segment:
        name = "c" + b.var
        n = 1
        while name in taken:
            name = f"c{b.var}{n}"
            n += 1
        taken.add(name)
        fmap[b.var] = name

    guards = []
    for b in segment:
        if b.guard is not None:
            guards.append(substitute_all(b.guard, {v: Const(c) for v, c in fmap.items()}))
    frozen = substitute_all(rest, {v: Const(c) for v, c in fmap.items()})
    if guards:
        frozen = Implies(conj(guards), frozen)
    return frozen, fmap


def _rebuild_prefix(binders: list[Binder], core: Formula) -> Formula:
    for b in reversed(binders):
        core = Forall(b.var, Implies(b.guard, core) if b.guard is not None else core)
    return core


def universal_closure(f: Formula) -> Formula:
    """Universally quantify the free variables of `f` in first-occurrence
    order.  Closed formulas are returned unchanged."""
    for v in reversed(free_vars(f)):
        f = Forall(v, f)
    return f


# ---------------------------------------------------------------------------
# Printer


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "iff", Implies: "implies", Or: "or", And: "and"}


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, App):
        return f"{t.symbol}({','.join(render_term(a) for a in t.args)})"
    raise TypeError(t)


def render(f: Formula) -> str:
    """Deterministic textual form; `parse(render(f))` is structural identity
    for formulas whose free identifiers are constants (i.e. every Var is
    bound), which all elaborated formulas are."""
    return _render(f, 0)


def _render(f: Formula, prec: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Pred):
        if not f.args:
            return f.symbol
        return f"{f.symbol}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{render_term(f.lhs)} = {render_term(f.rhs)}"
    if isinstance(f, Not):
        return f"not {_render(f.body, 5)}"
    if isinstance(f, BINARY):
        p = _PREC[type(f)]
        s = f"{_render(f.left, p + 1)} {_OPS[type(f)]} {_render(f.right, p)}"
        return f"({s})" if prec > p else s
    if isinstance(f, QUANTIFIERS):
        head = "forall" if isinstance(f, Forall) else "exists"
        groups: list[str] = []
        g: Formula = f
        kind = type(f)
        while isinstance(g, kind):
            body = g.body
            guard = None
            if kind is Forall and isinstance(body, Implies):
                cand = body.left
            elif kind is Exists and isinstance(body, And):
                cand = body.left
            else:
                cand = None
            # Guard sugar only when the parser can recover the binder: the
            # quantified variable must be the guard's first argument.
            if (
                isinstance(cand, Pred)
                and cand.args
                and cand.args[0] == Var(g.var)
            ):
                guard = cand
                groups.append(_render(guard, 6))
                g = body.right
            else:
                groups.append(g.var)
                g = body
        s = f"{head} {', '.join(groups)}. {_render(g, 0)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f)


# ---------------------------------------------------------------------------
# Parser for the printer's output (the "raw" view of formulas)


class FolSyntaxError(ValueError):
    pass


_TOKEN_WORDS = {"forall", "exists", "and", "or", "implies", "iff", "not", "true", "false"}


def _lex(text: str) -> Iterator[str]:
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isalnum() or c in "_'":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            yield text[i:j]
            i = j
        elif c in "(),.=":
            yield c
            i += 1
        else:
            raise FolSyntaxError(f"unexpected character {c!r} at offset {i}")


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_lex(text))
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        if self.pos >= len(self.toks):
            raise FolSyntaxError("unexpected end of input")
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise FolSyntaxError(f"expected {tok!r}, got {got!r}")

    def formula(self, bound: frozenset[str]) -> Formula:
        return self.iff_expr(bound)

    def iff_expr(self, bound: frozenset[str]) -> Formula:
        left = self.impl_expr(bound)
        if self.peek() == "iff":
            self.next()
            return Iff(left, self.iff_expr(bound))
        return left

    def impl_expr(self, bound: frozenset[str]) -> Formula:
        left = self.or_expr(bound)
        if self.peek() == "implies":
            self.next()
            return Implies(left, self.impl_expr(bound))
        return left

    def or_expr(self, bound: frozenset[str]) -> Formula:
        left = self.and_expr(bound)
        if self.peek() == "or":
            self.next()
            return Or(left, self.or_expr(bound))
        return left

    def and_expr(self, bound: frozenset[str]) -> Formula:
        left = self.unary(bound)
        if self.peek() == "and":
            self.next()
            return And(left, self.and_expr(bound))
        return left

    def unary(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok == "not":
            self.next()
            return Not(self.unary(bound))
        if tok in ("forall", "exists"):
            return self.quantified(bound)
        return self.atom(bound)

    def quantified(self, bound: frozenset[str]) -> Formula:
        kind = self.next()
        entries: list[tuple[str, Pred | None]] = []
        while True:
            name = self.next()
            if name in _TOKEN_WORDS:
                raise FolSyntaxError(f"bad binder {name!r}")
            if self.peek() == "(":
                # guarded binder: pred(var, args...) binds its first argument
                self.expect("(")
                var = self.next()
                if var in _TOKEN_WORDS or not var[0].isalnum():
                    raise FolSyntaxError(f"bad guarded binder {var!r}")
                inner = bound | {var}
                args: list = [Var(var)]
                while self.peek() == ",":
                    self.next()
                    args.append(self.term(inner))
                self.expect(")")
                entries.append((var, Pred(name, tuple(args))))
                bound = inner
            else:
                entries.append((name, None))
                bound = bound | {name}
            if self.peek() == ",":
                self.next()
                continue
            break
        self.expect(".")
        body = self.formula(bound)
        for var, guard in reversed(entries):
            if kind == "forall":
                body = Forall(var, Implies(guard, body) if guard else body)
            else:
                body = Exists(var, And(guard, body) if guard else body)
        return body

    def atom(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok == "(":
            # could be a parenthesised formula or a term on the left of "="
            save = self.pos
            try:
                self.next()
                f = self.formula(bound)
                self.expect(")")
                return f
            except FolSyntaxError:
                self.pos = save
        if tok == "true":
            self.next()
            return Top()
        if tok == "false":
            self.next()
            return Bottom()
        t = self.term(bound)
        if self.peek() == "=":
            self.next()
            return Eq(t, self.term(bound))
        # a bare term here must be a predicate application
        if isinstance(t, App):
            return Pred(t.symbol, t.args)
        if isinstance(t, (Var, Const)):
            return Pred(t.name)
        raise FolSyntaxError(f"expected formula, got term {t!r}")

    def term(self, bound: frozenset[str]) -> Term:
        name = self.next()
        if name in _TOKEN_WORDS or name in "(),.=":
            raise FolSyntaxError(f"expected term, got {name!r}")
        if self.peek() == "(":
            return App(name, tuple(self.term_args(bound)))
        return Var(name) if name in bound else Const(name)

    def term_args(self, bound: frozenset[str]) -> tuple[Term, ...]:
        self.expect("(")
        args = [self.term(bound)]
        while self.peek() == ",":
            self.next()
            args.append(self.term(bound))
        self.expect(")")
        return tuple(args)


def parse(text: str) -> Formula:
    """Parse the printer's output back into a formula.

    Identifiers not bound by a quantifier become constants; 0-ary
    applications stay predicates.
    """
    p = _Parser(text)
    f = p.formula(frozenset())
    if p.peek() is not None:
        raise FolSyntaxError(f"trailing input at token {p.peek()!r}")
    return f
