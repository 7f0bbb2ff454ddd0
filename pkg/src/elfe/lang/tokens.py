"""Tokenizer for the controlled natural language.

Identifiers are ASCII words ([A-Za-z0-9_'], not starting with an apostrophe);
everything else that is neither whitespace nor structural punctuation is
grouped into runs of Unicode symbol characters, so notations like "→", "∘",
"⊆", "⁻¹" or the superscript complement arrive as single tokens.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start_offset: int  # byte offsets into the UTF-8 encoding
    end_offset: int

    def cover(self, other: "SourceSpan") -> "SourceSpan":
        a, b = self, other
        if (b.start_line, b.start_col) < (a.start_line, a.start_col):
            a, b = b, a
        return SourceSpan(
            a.start_line, a.start_col, b.end_line, b.end_col,
            min(a.start_offset, b.start_offset), max(a.end_offset, b.end_offset),
        )


PUNCT = ".:,()[]{}"

WORD = "word"
SYMBOL = "symbol"


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    kind: str  # WORD, SYMBOL, or the punctuation character itself
    span: SourceSpan


def _is_word_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "_'")


def tokenize(text: str) -> list[Token]:
    """Split `text` into word, punctuation, and symbol-run tokens with
    1-based line/column spans and UTF-8 byte offsets."""
    toks: list[Token] = []
    line, col, offset = 1, 1, 0
    i, n = 0, len(text)

    def advance(upto: int) -> None:
        nonlocal line, col, offset, i
        for c in text[i:upto]:
            offset += len(c.encode("utf-8"))
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i = upto

    while i < n:
        c = text[i]
        if c.isspace():
            advance(i + 1)
            continue
        sl, sc, so = line, col, offset
        if _is_word_char(c) and c != "'":
            j = i
            while j < n and _is_word_char(text[j]):
                j += 1
            kind = WORD
        elif c in PUNCT:
            j = i + 1
            kind = c
        else:
            j = i
            while j < n:
                cj = text[j]
                if cj.isspace() or cj in PUNCT or _is_word_char(cj):
                    break
                j += 1
            kind = SYMBOL
        chunk = text[i:j]
        advance(j)
        toks.append(Token(chunk, kind, SourceSpan(sl, sc, line, col, so, offset)))
    return toks
