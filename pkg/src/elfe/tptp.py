"""TPTP first-order (FOF) emission and prover-output parsing.

Obligations are emitted one fof(...) record per context axiom, in context
order, followed by the single conjecture named "goal".  Identifier mangling
follows TPTP lexical rules: bound variables become uppercase words, constants
and functors lowercase words; characters outside [A-Za-z0-9_] are dropped and
collisions disambiguated with numeric suffixes, so the frozen constant "cx'"
arrives as "cx1".

Prover verdicts are recovered from the SZS ontology lines on stdout; the
text between "SZS output start"/"SZS output end" is captured as a model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import fol
from .fol import (
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
    Term,
    Top,
    Var,
)
from .kernel import Obligation

# SZS statuses the pipeline distinguishes.
THEOREM = "Theorem"
COUNTER_SATISFIABLE = "CounterSatisfiable"
SATISFIABLE = "Satisfiable"
UNKNOWN = "Unknown"
TIMEOUT = "Timeout"
ERROR = "Error"

_STATUS_MAP = {
    "Theorem": THEOREM,
    "CounterSatisfiable": COUNTER_SATISFIABLE,
    "Satisfiable": SATISFIABLE,
    "Timeout": TIMEOUT,
    "ResourceOut": TIMEOUT,
    "GaveUp": UNKNOWN,
    "Unknown": UNKNOWN,
}


@dataclass(frozen=True, slots=True)
class ProverVerdict:
    status: str
    model: str | None = None
    elapsed: float = 0.0
    raw: str = ""

    def __post_init__(self) -> None:
        if self.model is not None and self.status not in (
            COUNTER_SATISFIABLE,
            SATISFIABLE,
        ):
            raise ValueError(f"model attached to status {self.status}")


@dataclass(frozen=True, slots=True)
class TptpProblem:
    """Ordered formula records; exactly one conjecture."""

    records: tuple[tuple[str, str, Formula], ...]  # (name, role, formula)

    def __post_init__(self) -> None:
        conj = [n for n, role, _ in self.records if role == "conjecture"]
        if len(conj) != 1:
            raise ValueError(f"expected exactly one conjecture, got {conj}")
        names = [n for n, _, _ in self.records]
        if len(set(names)) != len(names):
            raise ValueError("duplicate record names")

    @property
    def conjecture(self) -> Formula:
        return next(f for _, role, f in self.records if role == "conjecture")

    @property
    def axioms(self) -> tuple[Formula, ...]:
        return tuple(f for _, role, f in self.records if role == "axiom")

    def text(self) -> str:
        lines = [
            f"fof({name}, {role}, {render_fof(f)})."
            for name, role, f in self.records
        ]
        return "\n".join(lines) + "\n"


class TptpError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Identifier mangling


class _Mangler:
    def __init__(self) -> None:
        self.map: dict[tuple[str, str], str] = {}
        self.used: set[str] = set()

    def get(self, name: str, kind: str) -> str:
        # kind: "var" (uppercase) or "sym" (lowercase)
        key = (kind, name)
        hit = self.map.get(key)
        if hit is not None:
            return hit
        base = re.sub(r"[^A-Za-z0-9_]", "", name)
        if kind == "var":
            base = (base[:1].upper() + base[1:]) if base else "X"
            if not base[0].isupper():
                base = "X" + base
        else:
            base = (base[:1].lower() + base[1:]) if base else "c"
            if not base[0].isalpha():
                base = "c" + base
        cand, n = base, 0
        while cand in self.used:
            n += 1
            cand = f"{base}{n}"
        self.map[key] = cand
        self.used.add(cand)
        return cand


def _mangle_formula(f: Formula, m: _Mangler, bound: frozenset[str]) -> Formula:
    def term(t: Term) -> Term:
        if isinstance(t, Var):
            if t.name in bound:
                return Var(m.get(t.name, "var"))
            return Const(m.get(t.name, "sym"))
        if isinstance(t, Const):
            return Const(m.get(t.name, "sym"))
        return App(m.get(t.symbol, "sym"), tuple(term(a) for a in t.args))

    if isinstance(f, Pred):
        return Pred(m.get(f.symbol, "sym"), tuple(term(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(term(f.lhs), term(f.rhs))
    if isinstance(f, Not):
        return Not(_mangle_formula(f.body, m, bound))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(
            _mangle_formula(f.left, m, bound), _mangle_formula(f.right, m, bound)
        )
    if isinstance(f, (Forall, Exists)):
        inner = _mangle_formula(f.body, m, bound | {f.var})
        return type(f)(m.get(f.var, "var"), inner)
    return f


def emit(ob: Obligation) -> TptpProblem:
    """Render an obligation as a TPTP problem (axioms in context order, then
    the conjecture named "goal")."""
    m = _Mangler()
    m.used.add("goal")
    names = _Mangler()
    names.used.add("goal")
    records: list[tuple[str, str, Formula]] = []
    for sid, g in ob.axioms:
        records.append((names.get(sid, "sym"), "axiom", _mangle_formula(g, m, frozenset())))
    records.append(("goal", "conjecture", _mangle_formula(ob.conjecture, m, frozenset())))
    return TptpProblem(tuple(records))


# ---------------------------------------------------------------------------
# FOF rendering


def render_term_fof(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, App):
        return f"{t.symbol}({','.join(render_term_fof(a) for a in t.args)})"
    raise TptpError(f"cannot render term {t!r}")


def render_fof(f: Formula) -> str:
    if isinstance(f, Top):
        return "$true"
    if isinstance(f, Bottom):
        return "$false"
    if isinstance(f, Pred):
        if not f.args:
            return f.symbol
        return f"{f.symbol}({','.join(render_term_fof(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"({render_term_fof(f.lhs)} = {render_term_fof(f.rhs)})"
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"({render_term_fof(f.body.lhs)} != {render_term_fof(f.body.rhs)})"
        return f"~ {render_fof(f.body)}"
    if isinstance(f, (And, Or, Implies, Iff)):
        op = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(f)]
        return f"({render_fof(f.left)} {op} {render_fof(f.right)})"
    if isinstance(f, (Forall, Exists)):
        q = "!" if isinstance(f, Forall) else "?"
        return f"{q} [{f.var}] : {render_fof(f.body)}"
    raise TptpError(f"cannot render {f!r}")


# ---------------------------------------------------------------------------
# FOF parsing (inverse of emit on emit's image; "%" comments allowed)


_FOF_TOKEN = re.compile(
    r"\s*(?:%[^\n]*\n?|(?P<tok><=>|=>|!=|[()\[\]:,~&|=!?.]|\$?[A-Za-z0-9_]+))"
)


def _lex_fof(text: str) -> list[tuple[str, int]]:
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _FOF_TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise TptpError(f"lexical error at offset {pos}: {text[pos:pos+10]!r}")
        pos = m.end()
        if m.group("tok") is not None:
            toks.append((m.group("tok"), m.start("tok")))
    return toks


class _FofParser:
    def __init__(self, text: str):
        self.toks = _lex_fof(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self) -> str:
        if self.pos >= len(self.toks):
            raise TptpError("unexpected end of input")
        t = self.toks[self.pos][0]
        self.pos += 1
        return t

    def offset(self) -> int:
        return self.toks[self.pos][1] if self.pos < len(self.toks) else -1

    def expect(self, tok: str) -> None:
        at = self.offset()
        got = self.next()
        if got != tok:
            raise TptpError(f"expected {tok!r}, got {got!r} at offset {at}")

    def problem(self) -> TptpProblem:
        records = []
        while self.peek() is not None:
            self.expect("fof")
            self.expect("(")
            name = self.next()
            self.expect(",")
            role = self.next()
            self.expect(",")
            f = self.formula(frozenset())
            self.expect(")")
            self.expect(".")
            records.append((name, role, f))
        return TptpProblem(tuple(records))

    def formula(self, bound: frozenset[str]) -> Formula:
        left = self.unitary(bound)
        op = self.peek()
        if op in ("&", "|"):
            parts = [left]
            while self.peek() == op:
                self.next()
                parts.append(self.unitary(bound))
            out = parts[-1]
            cls = And if op == "&" else Or
            for p in reversed(parts[:-1]):
                out = cls(p, out)
            return out
        if op == "=>":
            self.next()
            return Implies(left, self.unitary(bound))
        if op == "<=>":
            self.next()
            return Iff(left, self.unitary(bound))
        return left

    def unitary(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.next()
            return Not(self.unitary(bound))
        if tok in ("!", "?"):
            self.next()
            self.expect("[")
            names = [self.next()]
            while self.peek() == ",":
                self.next()
                names.append(self.next())
            self.expect("]")
            self.expect(":")
            body = self.unitary(bound | set(names))
            cls = Forall if tok == "!" else Exists
            for v in reversed(names):
                body = cls(v, body)
            return body
        if tok == "(":
            self.next()
            # parenthesised formula or the left term of an (in)equality
            save = self.pos
            try:
                f = self.formula(bound)
                self.expect(")")
                return f
            except TptpError:
                self.pos = save
            t = self.term(bound)
            at = self.offset()
            op = self.next()
            if op not in ("=", "!="):
                raise TptpError(f"expected '=' or '!=', got {op!r} at offset {at}")
            rhs = self.term(bound)
            self.expect(")")
            eq = Eq(t, rhs)
            return eq if op == "=" else Not(eq)
        if tok == "$true":
            self.next()
            return Top()
        if tok == "$false":
            self.next()
            return Bottom()
        # plain atom
        t = self.term(bound)
        if isinstance(t, App):
            return Pred(t.symbol, t.args)
        if isinstance(t, (Const, Var)):
            return Pred(t.name)
        raise TptpError(f"expected atom, got {t!r}")

    def term(self, bound: frozenset[str]) -> Term:
        name = self.next()
        if not re.fullmatch(r"[A-Za-z0-9_]+", name or ""):
            raise TptpError(f"expected identifier, got {name!r}")
        if self.peek() == "(":
            self.next()
            args = [self.term(bound)]
            while self.peek() == ",":
                self.next()
                args.append(self.term(bound))
            self.expect(")")
            return App(name, tuple(args))
        if name[0].isupper():
            return Var(name)
        return Const(name)


def parse_fof(text: str) -> TptpProblem:
    """Parse a FOF problem; raises TptpError with an offset on bad syntax."""
    return _FofParser(text).problem()


# ---------------------------------------------------------------------------
# SZS output parsing


_SZS_STATUS = re.compile(r"SZS\s+status[:\s]+(\w+)", re.IGNORECASE)
_SZS_BLOCK = re.compile(
    r"SZS\s+output\s+start[^\n]*\n(.*?)^\s*[%#]*\s*SZS\s+output\s+end",
    re.DOTALL | re.MULTILINE | re.IGNORECASE,
)


def parse_szs(stdout: str, elapsed: float = 0.0) -> ProverVerdict:
    """Map the first SZS status line to a verdict; no SZS line means Unknown
    (raw output kept for diagnostics)."""
    m = _SZS_STATUS.search(stdout)
    if m is None:
        return ProverVerdict(UNKNOWN, None, elapsed, stdout)
    status = _STATUS_MAP.get(m.group(1), UNKNOWN)
    model: str | None = None
    if status in (COUNTER_SATISFIABLE, SATISFIABLE):
        blk = _SZS_BLOCK.search(stdout)
        if blk is not None:
            model = blk.group(1).strip("\n")
    return ProverVerdict(status, model, elapsed, stdout)
