"""End-to-end verification: parse, desugar, elaborate, collect obligations,
dispatch the prover portfolio, and assemble a per-line report.

Obligations are verified independently (one failing step never silences the
others) and concurrently.  The report is deterministic for fixed prover
verdicts: entries are ordered by source position, and every obligation leaf
appears exactly once.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import fol, tptp
from .kernel import (
    Assumed,
    BySubContext,
    Elaboration,
    Obligation,
    Statement,
    collect_obligations,
    elaborate,
)
from .lang import (
    Assume,
    CaseBlock,
    Definition,
    Document,
    Hence,
    Include,
    LangError,
    Lemma,
    LetBinding,
    Notation,
    SubProof,
    Then,
    apply_let_bindings,
    parse_document,
)
from .lang.tokens import SourceSpan
from .provers import ObligationResult, ProverConfig, default_configs, portfolio

# statement statuses
PARSED = "parsed"
ASSUMED = "assumed"
PROVED = "proved"
UNKNOWN = "unknown"
REFUTED = "refuted"
PARSE_ERROR = "parse_error"

GREEN = "green"
ORANGE = "orange"
RED = "red"


def status_color(status: str, verbose: bool = False) -> str:
    """Per-line colour; in verbose mode discharged obligations show orange
    (the internal view of checked leaves) instead of green."""
    if status in (ASSUMED, PARSED):
        return GREEN
    if status == PROVED:
        return ORANGE if verbose else GREEN
    return RED


@dataclass(slots=True)
class ReportEntry:
    id: str
    span: SourceSpan | None
    status: str
    prover: str | None = None
    model: str | None = None
    tptp: str | None = None
    message: str | None = None
    ms: float = 0.0

    def to_json(self) -> dict:
        out: dict = {"id": self.id, "status": self.status, "ms": round(self.ms, 3)}
        if self.span is not None:
            out["span"] = {
                "startLine": self.span.start_line,
                "startCol": self.span.start_col,
                "endLine": self.span.end_line,
                "endCol": self.span.end_col,
            }
        else:
            out["span"] = None
        for key in ("prover", "model", "tptp", "message"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


@dataclass(slots=True)
class VerificationReport:
    verified: bool
    statements: list[ReportEntry] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "verified": self.verified,
            "statements": [e.to_json() for e in self.statements],
            "elapsedMs": round(self.elapsed_ms, 3),
        }

    def text(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)


@dataclass(slots=True)
class VerifyOptions:
    lib_path: tuple[str | Path, ...] = ()
    prover_configs: list[ProverConfig] | None = None
    timeout: float = 5.0
    max_domain: int = 4
    emit_dir: str | Path | None = None
    max_workers: int = 4
    external_semaphore: threading.Semaphore | None = None


def verify_text(text: str, options: VerifyOptions | None = None) -> VerificationReport:
    """Run the whole pipeline on `text`; parse or elaboration failures yield
    a report with a parse_error entry rather than an exception."""
    options = options or VerifyOptions()
    start = time.monotonic()
    try:
        doc = parse_document(text, search_path=tuple(options.lib_path))
        doc = apply_let_bindings(doc)
        elab = elaborate(doc)
    except LangError as exc:
        entry = ReportEntry("error", exc.span, PARSE_ERROR, message=exc.message)
        return VerificationReport(False, [entry], (time.monotonic() - start) * 1000)

    obligations = collect_obligations(elab)
    configs = options.prover_configs
    if configs is None:
        configs = default_configs(options.timeout, options.max_domain)

    problems = {ob.statement_id: tptp.emit(ob) for ob in obligations}
    if options.emit_dir is not None:
        emit_dir = Path(options.emit_dir)
        emit_dir.mkdir(parents=True, exist_ok=True)
        for sid, problem in problems.items():
            (emit_dir / f"{sid}.p").write_text(problem.text(), encoding="utf-8")

    results: dict[str, ObligationResult] = {}

    def run(ob: Obligation) -> tuple[str, ObligationResult]:
        return ob.statement_id, portfolio(
            ob, configs, problems[ob.statement_id].text(),
            options.external_semaphore,
        )

    if obligations:
        with ThreadPoolExecutor(max_workers=max(1, options.max_workers)) as pool:
            for sid, res in pool.map(run, obligations):
                results[sid] = res

    entries = _assemble(doc, elab, problems, results)
    verified = all(e.status in (ASSUMED, PROVED, PARSED) for e in entries)
    return VerificationReport(verified, entries, (time.monotonic() - start) * 1000)


# ---------------------------------------------------------------------------
# Report assembly


def _assemble(
    doc: Document,
    elab: Elaboration,
    problems: dict,
    results: dict[str, ObligationResult],
) -> list[ReportEntry]:
    def leaf_entry(stmt: Statement) -> ReportEntry:
        res = results.get(stmt.id)
        problem = problems.get(stmt.id)
        if res is None:
            return ReportEntry(stmt.id, stmt.span, UNKNOWN)
        status = {
            "Proved": PROVED,
            "Refuted": REFUTED,
            "Unknown": UNKNOWN,
            "Error": UNKNOWN,
        }[res.verdict]
        return ReportEntry(
            stmt.id,
            stmt.span,
            status,
            prover=res.prover,
            model=res.model,
            tptp=problem.text() if problem is not None else None,
            ms=res.elapsed * 1000,
        )

    # lemma items pair with elaborated roots in document order
    lemma_items = [it for it in doc.items if isinstance(it, Lemma)]
    roots = dict(zip((id(it) for it in lemma_items), elab.lemma_roots))

    entries: list[ReportEntry] = []
    for item in doc.items:
        if getattr(item, "origin", "") != doc.name:
            continue  # spliced library items have no lines in this buffer
        if isinstance(item, (Include, Notation, LetBinding)):
            entries.append(ReportEntry(type(item).__name__.lower(), item.span, PARSED))
        elif isinstance(item, Definition):
            entries.append(ReportEntry(item.name, item.span, ASSUMED))
        elif isinstance(item, Lemma):
            root = elab.index[roots[id(item)]]
            entries.extend(_lemma_entries(item, root, leaf_entry))
    entries.sort(key=lambda e: (e.span.start_offset if e.span else 0))
    return entries


def _worst(statuses: list[str]) -> str:
    worst = PROVED
    for st in statuses:
        if st == REFUTED:
            return REFUTED
        if st == UNKNOWN:
            worst = UNKNOWN
    return worst


def _lemma_entries(lemma: Lemma, root: Statement, leaf_entry) -> list[ReportEntry]:
    out: list[ReportEntry] = []

    def walk(s: Statement) -> list[str]:
        statuses: list[str] = []
        if s.is_leaf():
            e = leaf_entry(s)
            out.append(e)
            statuses.append(e.status)
        elif isinstance(s.proof, Assumed) and s.role == "assume":
            out.append(ReportEntry(s.id, s.span, ASSUMED))
        for c in s.children():
            inner = walk(c)
            if c.role == "subproof":
                # the "Proof <goal>:" header line aggregates its body
                out.append(ReportEntry(c.id, c.span, _worst(inner)))
            statuses.extend(inner)
        return statuses

    statuses = walk(root)
    out.append(ReportEntry(root.id, lemma.header_span, _worst(statuses)))
    return out
