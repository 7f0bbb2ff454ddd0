"""Syntax tree for parsed documents: top-level items and proof steps."""

from __future__ import annotations

from dataclasses import dataclass

from ..fol import Formula
from .tokens import SourceSpan


@dataclass(frozen=True, slots=True)
class NotationPattern:
    """A surface pattern: literal Unicode chunks interleaved with placeholder
    slots, desugaring to `symbol` applied to the slot terms."""

    symbol: str
    elements: tuple[tuple[str, str], ...]  # ("lit", text) | ("slot", placeholder)
    span: SourceSpan | None = None

    @property
    def arity(self) -> int:
        return sum(1 for k, _ in self.elements if k == "slot")

    @property
    def literals(self) -> tuple[str, ...]:
        return tuple(t for k, t in self.elements if k == "lit")

    def shape(self) -> tuple:
        """Identity of the pattern's surface form (used for ambiguity checks)."""
        return tuple((k, t if k == "lit" else "_") for k, t in self.elements)

    def display(self) -> str:
        return " ".join(t if k == "lit" else t for k, t in self.elements)


@dataclass(frozen=True, slots=True)
class Include:
    names: tuple[str, ...]
    span: SourceSpan
    origin: str = ""


@dataclass(frozen=True, slots=True)
class Notation:
    pattern: NotationPattern
    span: SourceSpan
    origin: str = ""


@dataclass(frozen=True, slots=True)
class LetBinding:
    vars: tuple[str, ...]
    guards: tuple[Formula, ...]  # one guard per var, var occurring free in it
    span: SourceSpan
    origin: str = ""


@dataclass(frozen=True, slots=True)
class Definition:
    name: str
    formula: Formula
    span: SourceSpan
    # variables bound automatically by Let application / universal closure
    auto_bound: tuple[str, ...] = ()
    origin: str = ""


@dataclass(frozen=True, slots=True)
class Assume:
    formula: Formula
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Then:
    formula: Formula
    hints: tuple[str, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Hence:
    formula: Formula
    hints: tuple[str, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class CaseBlock:
    case: Formula
    steps: tuple["ProofStep", ...]
    span: SourceSpan
    header_span: SourceSpan
    qed_span: SourceSpan


@dataclass(frozen=True, slots=True)
class SubProof:
    goal: Formula
    steps: tuple["ProofStep", ...]
    span: SourceSpan
    header_span: SourceSpan
    qed_span: SourceSpan


ProofStep = Assume | Then | Hence | CaseBlock | SubProof


@dataclass(frozen=True, slots=True)
class Lemma:
    name: str
    formula: Formula
    proof: tuple[ProofStep, ...]
    span: SourceSpan
    header_span: SourceSpan
    qed_span: SourceSpan
    auto_bound: tuple[str, ...] = ()
    origin: str = ""


Item = Include | Notation | LetBinding | Definition | Lemma


@dataclass(frozen=True, slots=True)
class Document:
    items: tuple[Item, ...]
    name: str = "<input>"


class LangError(Exception):
    """Parse or desugaring error, carrying the offending span."""

    def __init__(self, message: str, span: SourceSpan | None = None,
                 expected: tuple[str, ...] = ()):
        self.message = message
        self.span = span
        self.expected = expected
        loc = f" at {span.start_line}:{span.start_col}" if span else ""
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message}{loc}{exp}")
