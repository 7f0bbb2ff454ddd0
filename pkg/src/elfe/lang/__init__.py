"""Controlled-natural-language front end: tokenizer, parser, desugarer."""

from .ast import (
    Assume,
    CaseBlock,
    Definition,
    Document,
    Hence,
    Include,
    Item,
    LangError,
    Lemma,
    LetBinding,
    Notation,
    NotationPattern,
    ProofStep,
    SubProof,
    Then,
)
from .parser import (
    Loader,
    ParseContext,
    Registry,
    apply_let_bindings,
    parse_document,
    parse_formula,
    resolve_includes,
)
from .tokens import SourceSpan, Token, tokenize

__all__ = [
    "Assume", "CaseBlock", "Definition", "Document", "Hence", "Include",
    "Item", "LangError", "Lemma", "LetBinding", "Notation", "NotationPattern",
    "ProofStep", "SubProof", "Then", "Loader", "ParseContext", "Registry",
    "apply_let_bindings", "parse_document", "parse_formula",
    "resolve_includes", "SourceSpan", "Token", "tokenize",
]
