"""Recursive-descent parser and desugarer for the controlled language.

A document is a sequence of "."-terminated items: Include, Notation, Let,
Definition, and Lemma (with a Proof block).  Formulas are parsed directly
into first-order syntax: notation patterns desugar to their target symbols,
bounded quantifiers relativize to the membership predicate, "x is w"
becomes w(x), "t[u,v]" becomes relapp(t,u,v), "t{u}" the term funApp(t,u),
and the postfix superscripts desugar to complement/inverse.

Includes are resolved while parsing (a library's notations must be in scope
for the text that follows), each file at most once, cycles rejected.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from ..fol import (
    And,
    App,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Pred,
    Term,
    Var,
    free_vars,
)
from .ast import (
    Assume,
    CaseBlock,
    Definition,
    Document,
    Hence,
    Include,
    Item,
    Lemma,
    LangError,
    LetBinding,
    Notation,
    NotationPattern,
    ProofStep,
    SubProof,
    Then,
)
from .tokens import SYMBOL, WORD, SourceSpan, Token, tokenize

KEYWORDS = {
    "Include", "Notation", "Definition", "Lemma", "Let",
    "Proof", "Assume", "Then", "Hence", "Case", "qed",
}
CONNECTIVES = {"and", "or", "not", "implies", "iff", "for", "all", "exists", "is", "be", "by"}
RESERVED = KEYWORDS | CONNECTIVES

MEMBER = "∈"
FUN_APP = "funApp"
REL_APP = "relapp"
POSTFIX_SYMBOLS = {"ᶜ": "complement", "⁻¹": "inverse"}

BUILTIN_KINDS = {
    "in": ("pred", 2),
    REL_APP: ("pred", 3),
    FUN_APP: ("fun", 2),
    "complement": ("fun", 1),
    "inverse": ("fun", 1),
}


class Registry:
    """Notation patterns in declaration order, with precedence bookkeeping."""

    def __init__(self) -> None:
        self.patterns: list[NotationPattern] = []

    def register(self, pat: NotationPattern) -> None:
        for old in self.patterns:
            if old.shape() == pat.shape():
                if old.symbol == pat.symbol:
                    return  # harmless re-declaration
                raise LangError(
                    f"ambiguous notation: pattern '{pat.display()}' already "
                    f"declared for '{old.symbol}', cannot redeclare for "
                    f"'{pat.symbol}'",
                    pat.span,
                )
        self.patterns.append(pat)

    def _ranked(self, cands: list[tuple[int, NotationPattern]]):
        # brackets beat patterns structurally; among patterns: longest
        # literal sequence first, then declaration order
        return sorted(
            cands,
            key=lambda ip: (-len(ip[1].literals), -sum(map(len, ip[1].literals)), ip[0]),
        )

    def infix_candidates(self, lit: str) -> list[NotationPattern]:
        out = [
            (i, p)
            for i, p in enumerate(self.patterns)
            if p.elements and p.elements[0][0] == "slot"
            and len(p.elements) > 1 and p.elements[1] == ("lit", lit)
        ]
        return [p for _, p in self._ranked(out)]

    def prefix_candidates(self, lit: str) -> list[NotationPattern]:
        out = [
            (i, p)
            for i, p in enumerate(self.patterns)
            if p.elements and p.elements[0] == ("lit", lit)
        ]
        return [p for _, p in self._ranked(out)]


class SymbolTable:
    """Arity and kind (predicate vs function) per symbol, fixed per run."""

    def __init__(self) -> None:
        self.table: dict[str, tuple[str, int]] = dict(BUILTIN_KINDS)

    def check(self, name: str, kind: str, arity: int, span: SourceSpan | None) -> None:
        seen = self.table.get(name)
        if seen is None:
            self.table[name] = (kind, arity)
        elif seen != (kind, arity):
            raise LangError(
                f"symbol '{name}' used as {kind}/{arity} but previously as "
                f"{seen[0]}/{seen[1]}",
                span,
            )

    def check_formula(self, f: Formula, span: SourceSpan | None) -> None:
        def walk_term(t: Term) -> None:
            if isinstance(t, App):
                self.check(t.symbol, "fun", len(t.args), span)
                for a in t.args:
                    walk_term(a)

        def walk(g: Formula) -> None:
            if isinstance(g, Pred):
                self.check(g.symbol, "pred", len(g.args), span)
                for a in g.args:
                    walk_term(a)
            elif isinstance(g, Eq):
                walk_term(g.lhs)
                walk_term(g.rhs)
            elif isinstance(g, Not):
                walk(g.body)
            elif isinstance(g, (And, Or, Implies, Iff)):
                walk(g.left)
                walk(g.right)
            elif isinstance(g, (Forall, Exists)):
                walk(g.body)

        walk(f)


class Loader:
    """Locates and parses library files ("<name>.elfe" on the search path),
    each at most once per run."""

    def __init__(self, search_path: tuple[Path, ...]):
        self.search_path = tuple(Path(p) for p in search_path)
        self.loaded: set[str] = set()
        self.in_progress: list[str] = []

    def locate(self, name: str) -> Path | None:
        for d in self.search_path:
            p = d / f"{name}.elfe"
            if p.is_file():
                return p
        return None

    def load(self, name: str, ctx: "ParseContext", span: SourceSpan) -> list[Item]:
        if name in self.in_progress:
            cycle = " -> ".join(self.in_progress + [name])
            raise LangError(f"include cycle: {cycle}", span)
        if name in self.loaded:
            return []
        path = self.locate(name)
        if path is None:
            dirs = ", ".join(str(d) for d in self.search_path) or "<empty>"
            raise LangError(f"library '{name}' not found on search path ({dirs})", span)
        self.in_progress.append(name)
        try:
            text = path.read_text(encoding="utf-8")
            doc = _parse_with_context(text, name, ctx)
        finally:
            self.in_progress.pop()
        self.loaded.add(name)
        return list(doc.items)


class ParseContext:
    def __init__(self, loader: Loader | None = None):
        self.registry = Registry()
        self.symbols = SymbolTable()
        self.loader = loader


class _Parser:
    def __init__(self, tokens: list[Token], name: str, ctx: ParseContext):
        self.toks = tokens
        self.pos = 0
        self.name = name
        self.ctx = ctx
        self.lets: list[tuple[str, Formula]] = []  # file-scoped, declaration order
        self.lemma_count = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.toks[i] if i < len(self.toks) else None

    def at_word(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == WORD and t.text == text

    def at_punct(self, ch: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == ch

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1].span if self.toks else None
            raise LangError("unexpected end of input", last)
        self.pos += 1
        return t

    def expect_punct(self, ch: str) -> Token:
        t = self.peek()
        if t is None or t.kind != ch:
            raise LangError(
                f"expected '{ch}'" + (f", got '{t.text}'" if t else ""),
                t.span if t else (self.toks[-1].span if self.toks else None),
                expected=(ch,),
            )
        return self.next()

    def expect_word(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.kind != WORD or t.text != text:
            raise LangError(
                f"expected '{text}'" + (f", got '{t.text}'" if t else ""),
                t.span if t else None,
                expected=(text,),
            )
        return self.next()

    def identifier(self) -> Token:
        t = self.peek()
        if t is None or t.kind != WORD or t.text in RESERVED:
            raise LangError(
                "expected identifier" + (f", got '{t.text}'" if t else ""),
                t.span if t else None,
                expected=("identifier",),
            )
        return self.next()

    # -- document items ------------------------------------------------------

    def document(self) -> Document:
        items: list[Item] = []
        while self.peek() is not None:
            items.extend(self.item())
        return Document(tuple(items), self.name)

    def item(self) -> list[Item]:
        t = self.peek()
        assert t is not None
        if t.kind != WORD or t.text not in KEYWORDS:
            raise LangError(
                f"unknown keyword '{t.text}'",
                t.span,
                expected=("Include", "Notation", "Let", "Definition", "Lemma"),
            )
        if t.text == "Include":
            return self.include_item()
        if t.text == "Notation":
            return [self.notation_item()]
        if t.text == "Let":
            return [self.let_item()]
        if t.text == "Definition":
            return [self.definition_item()]
        if t.text == "Lemma":
            return [self.lemma_item()]
        raise LangError(f"'{t.text}' cannot start a top-level item", t.span)

    def include_item(self) -> list[Item]:
        start = self.expect_word("Include")
        names = [self.identifier().text]
        while self.at_punct(","):
            self.next()
            names.append(self.identifier().text)
        end = self.expect_punct(".")
        span = start.span.cover(end.span)
        out: list[Item] = []
        if self.ctx.loader is not None:
            for name in names:
                out.extend(self.ctx.loader.load(name, self.ctx, span))
        out.append(Include(tuple(names), span, origin=self.name))
        return out

    def notation_item(self) -> Notation:
        start = self.expect_word("Notation")
        name = self.identifier()
        self.expect_punct(":")
        elements: list[tuple[str, str]] = []
        while not self.at_punct("."):
            t = self.next()
            if t.kind == WORD:
                if t.text in RESERVED:
                    raise LangError(f"reserved word '{t.text}' in notation pattern", t.span)
                elements.append(("slot", t.text))
            else:
                elements.append(("lit", t.text))
        end = self.expect_punct(".")
        span = start.span.cover(end.span)
        if not any(k == "lit" for k, _ in elements):
            raise LangError("notation pattern needs at least one literal token", span)
        if not any(k == "slot" for k, _ in elements):
            raise LangError("notation pattern needs at least one placeholder", span)
        pat = NotationPattern(name.text, tuple(elements), span)
        self.ctx.registry.register(pat)
        return Notation(pat, span, origin=self.name)

    def let_item(self) -> LetBinding:
        start = self.expect_word("Let")
        # "Let v, w be guard." vs "Let <pattern instance>."
        save = self.pos
        vars_: list[str] = []
        guards: list[Formula] = []
        try:
            names = [self.identifier()]
            while self.at_punct(","):
                self.next()
                names.append(self.identifier())
            self.expect_word("be")
            guard_name = self.identifier()
            end = self.expect_punct(".")
            for tok in names:
                vars_.append(tok.text)
                guards.append(Pred(guard_name.text, (Var(tok.text),)))
        except LangError:
            self.pos = save
            atom = self.atom()
            end = self.expect_punct(".")
            if not isinstance(atom, Pred) or not atom.args or not isinstance(atom.args[0], Var):
                raise LangError(
                    "a pattern Let must bind the first placeholder of a notation",
                    start.span.cover(end.span),
                )
            vars_.append(atom.args[0].name)
            guards.append(atom)
        span = start.span.cover(end.span)
        for v, g in zip(vars_, guards):
            self.ctx.symbols.check_formula(g, span)
            for seen_v, seen_g in self.lets:
                if seen_v == v and seen_g != g:
                    raise LangError(
                        f"'{v}' is already bound with a different guard", span
                    )
            self.lets.append((v, g))
        return LetBinding(tuple(vars_), tuple(guards), span, origin=self.name)

    def definition_item(self) -> Definition:
        start = self.expect_word("Definition")
        name = self.identifier()
        self.expect_punct(":")
        f = self.formula()
        end = self.expect_punct(".")
        span = start.span.cover(end.span)
        self.ctx.symbols.check_formula(f, span)
        return Definition(name.text, f, span, origin=self.name)

    def lemma_item(self) -> Lemma:
        start = self.expect_word("Lemma")
        if self.at_punct(":"):
            self.lemma_count += 1
            name = f"lemma{self.lemma_count}"
        else:
            name = self.identifier().text
        self.expect_punct(":")
        f = self.formula()
        hdr_end = self.expect_punct(".")
        header_span = start.span.cover(hdr_end.span)
        self.ctx.symbols.check_formula(f, header_span)
        self.expect_word("Proof")
        self.expect_punct(":")
        steps = self.steps()
        qed = self.expect_word("qed")
        end = self.expect_punct(".")
        qed_span = qed.span.cover(end.span)
        return Lemma(
            name, f, tuple(steps), start.span.cover(end.span), header_span,
            qed_span, origin=self.name,
        )

    # -- proof steps ----------------------------------------------------------

    def steps(self) -> list[ProofStep]:
        out: list[ProofStep] = []
        while True:
            t = self.peek()
            if t is None:
                raise LangError("unterminated proof: expected 'qed'", None, expected=("qed",))
            if t.kind == WORD and t.text == "qed":
                return out
            out.append(self.step())

    def step(self) -> ProofStep:
        t = self.peek()
        assert t is not None
        if t.kind != WORD or t.text not in ("Assume", "Then", "Hence", "Case", "Proof"):
            raise LangError(
                f"expected a proof step, got '{t.text}'",
                t.span,
                expected=("Assume", "Then", "Hence", "Case", "Proof", "qed"),
            )
        start = self.next()
        if start.text == "Assume":
            f = self.formula()
            end = self.expect_punct(".")
            sp = start.span.cover(end.span)
            self.ctx.symbols.check_formula(f, sp)
            return Assume(f, sp)
        if start.text in ("Then", "Hence"):
            f = self.formula()
            hints: list[str] = []
            if self.at_word("by"):
                self.next()
                hints.append(self.identifier().text)
                while self.at_punct(","):
                    self.next()
                    hints.append(self.identifier().text)
            end = self.expect_punct(".")
            sp = start.span.cover(end.span)
            self.ctx.symbols.check_formula(f, sp)
            cls = Then if start.text == "Then" else Hence
            return cls(f, tuple(hints), sp)
        # Case φ: steps qed.   |   Proof φ: steps qed.
        f = self.formula()
        colon = self.expect_punct(":")
        header_span = start.span.cover(colon.span)
        body = self.steps()
        if not body and start.text == "Case":
            raise LangError("empty case body", start.span)
        qed = self.expect_word("qed")
        end = self.expect_punct(".")
        sp = start.span.cover(end.span)
        qed_span = qed.span.cover(end.span)
        self.ctx.symbols.check_formula(f, sp)
        if start.text == "Case":
            return CaseBlock(f, tuple(body), sp, header_span, qed_span)
        return SubProof(f, tuple(body), sp, header_span, qed_span)

    # -- formulas --------------------------------------------------------------

    def formula(self) -> Formula:
        return self.iff_expr()

    def iff_expr(self) -> Formula:
        left = self.impl_expr()
        if self.at_word("iff"):
            self.next()
            return Iff(left, self.iff_expr())
        return left

    def impl_expr(self) -> Formula:
        left = self.or_expr()
        if self.at_word("implies"):
            self.next()
            return Implies(left, self.impl_expr())
        return left

    def or_expr(self) -> Formula:
        left = self.and_expr()
        if self.at_word("or"):
            self.next()
            return Or(left, self.or_expr())
        return left

    def and_expr(self) -> Formula:
        left = self.unary()
        if self.at_word("and"):
            self.next()
            return And(left, self.and_expr())
        return left

    def unary(self) -> Formula:
        if self.at_word("not"):
            self.next()
            return Not(self.unary())
        if self.at_word("for") or self.at_word("exists"):
            return self.quantified()
        return self.atom()

    def quantified(self) -> Formula:
        if self.at_word("for"):
            self.next()
            self.expect_word("all")
            universal = True
        else:
            self.expect_word("exists")
            universal = False
        binders: list[tuple[str, Term | None]] = []
        while True:
            name = self.identifier()
            domain: Term | None = None
            t = self.peek()
            if t is not None and t.kind == SYMBOL and t.text == MEMBER:
                self.next()
                domain = self.term()
            binders.append((name.text, domain))
            if self.at_punct(","):
                self.next()
                continue
            break
        self.expect_punct(".")
        body = self.formula()
        # bounded quantifiers relativize to the membership predicate
        for name, domain in reversed(binders):
            if universal:
                if domain is not None:
                    body = Implies(Pred("in", (Var(name), domain)), body)
                body = Forall(name, body)
            else:
                if domain is not None:
                    body = And(Pred("in", (Var(name), domain)), body)
                body = Exists(name, body)
        return body

    def atom(self) -> Formula:
        save = self.pos
        term: Term | None = None
        try:
            term = self.term()
        except LangError:
            self.pos = save
        if term is not None:
            t = self.peek()
            if t is not None and t.kind == SYMBOL and t.text == "=":
                self.next()
                return Eq(term, self.term())
            if t is not None and t.kind == SYMBOL and t.text == MEMBER:
                self.next()
                return Pred("in", (term, self.term()))
            if t is not None and t.kind == WORD and t.text == "is":
                self.next()
                name = self.identifier()
                return Pred(name.text, (term,))
            if t is not None and t.kind == "[":
                args = self.bracket_args()
                return Pred(REL_APP, (term, *args))
            # no relational continuation: a bare term here must denote an atom
            if isinstance(term, App):
                return Pred(term.symbol, term.args)
            if isinstance(term, Var):
                return Pred(term.name)
            self.pos = save
        if self.at_punct("("):
            self.next()
            f = self.formula()
            self.expect_punct(")")
            return f
        t = self.peek()
        raise LangError(
            "expected a formula" + (f", got '{t.text}'" if t else ""),
            t.span if t else None,
            expected=("formula",),
        )

    def bracket_args(self) -> tuple[Term, Term]:
        self.expect_punct("[")
        a = self.term()
        self.expect_punct(",")
        b = self.term()
        self.expect_punct("]")
        return a, b

    # -- terms -------------------------------------------------------------------

    def term(self) -> Term:
        t = self.tight_term()
        while True:
            nxt = self.peek()
            if nxt is None or nxt.kind not in (SYMBOL, ":"):
                break
            cands = self.ctx.registry.infix_candidates(nxt.text)
            matched: Term | None = None
            for pat in cands:
                save = self.pos
                try:
                    args: list[Term] = [t]
                    for kind, text in pat.elements[1:]:
                        if kind == "lit":
                            nt = self.next()
                            if nt.text != text:
                                raise LangError(f"expected '{text}'", nt.span)
                        else:
                            args.append(self.tight_term())
                    matched = App(pat.symbol, tuple(args))
                    break
                except LangError:
                    self.pos = save
            if matched is None:
                break
            t = matched
        return t

    def tight_term(self) -> Term:
        t = self.primary_term()
        while True:
            nxt = self.peek()
            if nxt is None:
                break
            if nxt.kind == "{":
                self.next()
                arg = self.term()
                self.expect_punct("}")
                t = App(FUN_APP, (t, arg))
            elif nxt.kind == SYMBOL and nxt.text in POSTFIX_SYMBOLS:
                self.next()
                t = App(POSTFIX_SYMBOLS[nxt.text], (t,))
            else:
                break
        return t

    def primary_term(self) -> Term:
        t = self.peek()
        if t is None:
            raise LangError("expected a term", None, expected=("term",))
        if t.kind == "(":
            self.next()
            inner = self.term()
            self.expect_punct(")")
            return inner
        if t.kind == SYMBOL:
            for pat in self.ctx.registry.prefix_candidates(t.text):
                save = self.pos
                try:
                    args: list[Term] = []
                    for kind, text in pat.elements:
                        if kind == "lit":
                            nt = self.next()
                            if nt.text != text:
                                raise LangError(f"expected '{text}'", nt.span)
                        else:
                            args.append(self.tight_term())
                    return App(pat.symbol, tuple(args))
                except LangError:
                    self.pos = save
        if t.kind != WORD or t.text in RESERVED:
            raise LangError(f"expected a term, got '{t.text}'", t.span, expected=("term",))
        self.next()
        if self.at_punct("("):
            # plain first-order application f(t1, ..., tn)
            self.next()
            args = [self.term()]
            while self.at_punct(","):
                self.next()
                args.append(self.term())
            self.expect_punct(")")
            return App(t.text, tuple(args))
        return Var(t.text)


def _parse_with_context(text: str, name: str, ctx: ParseContext) -> Document:
    return _Parser(tokenize(text), name, ctx).document()


def parse_document(
    text: str,
    name: str = "<input>",
    search_path: tuple[str | Path, ...] | None = None,
) -> Document:
    """Parse `text` into a Document.  When `search_path` is given, Include
    items are resolved in place (libraries spliced before the including
    document's items, depth-first, each at most once)."""
    loader = Loader(tuple(Path(p) for p in search_path)) if search_path is not None else None
    ctx = ParseContext(loader)
    return _parse_with_context(text, name, ctx)


def parse_formula(text: str, registry: Registry | None = None) -> Formula:
    """Parse a single formula (used by tests and the raw-view tooling)."""
    ctx = ParseContext()
    if registry is not None:
        ctx.registry = registry
    p = _Parser(tokenize(text), "<formula>", ctx)
    f = p.formula()
    if p.peek() is not None:
        raise LangError(f"trailing input '{p.peek().text}'", p.peek().span)
    ctx.symbols.check_formula(f, None)
    return f


def resolve_includes(doc: Document, search_path: tuple[str | Path, ...]) -> Document:
    """Standalone include resolution for an already-parsed document: library
    items are spliced before the document's items, depth-first, each file at
    most once; cycles and missing libraries are errors."""
    loader = Loader(tuple(Path(p) for p in search_path))
    ctx = ParseContext(loader)
    spliced: list[Item] = []
    rest: list[Item] = []
    for item in doc.items:
        if isinstance(item, Include):
            for name in item.names:
                spliced.extend(loader.load(name, ctx, item.span))
            rest.append(item)
        else:
            rest.append(item)
    return Document(tuple(spliced + rest), doc.name)


# ---------------------------------------------------------------------------
# Let application


def apply_let_bindings(doc: Document) -> Document:
    """Universally quantify Let-bound symbols (guards prepended) in every
    subsequent Definition and Lemma that mentions them, then close any
    remaining free variables.

    The binding scope is the declaring document: spliced library items only
    see their own file's Lets (tracked via item origin).
    """
    scopes: dict[str, list[tuple[str, Formula]]] = {}
    items: list[Item] = []
    for item in doc.items:
        if isinstance(item, LetBinding):
            scope = scopes.setdefault(item.origin, [])
            for v, g in zip(item.vars, item.guards):
                for sv, sg in scope:
                    if sv == v and sg != g:
                        raise LangError(f"'{v}' is already bound with a different guard", item.span)
                scope.append((v, g))
            items.append(item)
        elif isinstance(item, (Definition, Lemma)):
            scope = scopes.setdefault(item.origin, [])
            wrapped, auto = _wrap(item.formula, scope)
            items.append(dataclasses.replace(item, formula=wrapped, auto_bound=auto))
        else:
            items.append(item)
    return Document(tuple(items), doc.name)


def _wrap(f: Formula, scope: list[tuple[str, Formula]]) -> tuple[Formula, tuple[str, ...]]:
    free = set(free_vars(f))
    needed: list[tuple[str, Formula]] = []
    changed = True
    while changed:
        changed = False
        for v, g in scope:
            if v in free and all(v != nv for nv, _ in needed):
                needed.append((v, g))
                free |= set(free_vars(g)) - {v}
                changed = True
    needed.sort(key=lambda vg: _scope_index(scope, vg[0]))
    for v, g in reversed(needed):
        f = Forall(v, Implies(g, f))
    closure = [v for v in free_vars(f)]
    for v in reversed(closure):
        f = Forall(v, f)
    return f, tuple(closure + [v for v, _ in needed])


def _scope_index(scope: list[tuple[str, Formula]], var: str) -> int:
    for i, (v, _) in enumerate(scope):
        if v == var:
            return i
    return len(scope)
