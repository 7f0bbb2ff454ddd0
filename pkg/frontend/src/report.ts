/** Report JSON produced by the verification service, and the pure mapping
 * from statement statuses to line decorations.  The editor renders strictly
 * from this data: no verification logic lives in the client. */

export type Status =
  | "parsed"
  | "assumed"
  | "proved"
  | "unknown"
  | "refuted"
  | "parse_error";

export interface Span {
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export interface StatementEntry {
  id: string;
  status: Status;
  span: Span | null;
  ms: number;
  prover?: string;
  model?: string;
  tptp?: string;
  message?: string;
}

export interface Report {
  verified: boolean;
  statements: StatementEntry[];
  elapsedMs: number;
}

export type LineColor = "green" | "red";

/** Mirror of the server's per-line colour mapping. */
export function statusColor(status: Status): LineColor {
  switch (status) {
    case "parsed":
    case "assumed":
    case "proved":
      return "green";
    case "unknown":
    case "refuted":
    case "parse_error":
      return "red";
  }
}

/** Per-line decorations for a buffer with `lineCount` lines: every line a
 * statement's span covers gets that statement's colour; uncovered lines stay
 * undecorated.  (Report spans are disjoint, so the mapping is unambiguous.) */
export function lineDecorations(
  report: Report,
  lineCount: number,
): Map<number, LineColor> {
  const out = new Map<number, LineColor>();
  for (const entry of report.statements) {
    if (!entry.span) continue;
    const color = statusColor(entry.status);
    const last = Math.min(entry.span.endLine, lineCount);
    for (let line = entry.span.startLine; line <= last; line++) {
      out.set(line, color);
    }
  }
  return out;
}

/** The statement whose span covers `line`, if any. */
export function statementAtLine(
  report: Report,
  line: number,
): StatementEntry | null {
  for (const entry of report.statements) {
    if (!entry.span) continue;
    if (entry.span.startLine <= line && line <= entry.span.endLine) {
      return entry;
    }
  }
  return null;
}
