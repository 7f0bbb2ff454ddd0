/** Detail-panel content for a clicked line: the raw proof obligation, the
 * winning prover and time, and the countermodel when the step was refuted.
 * Pure so the contract tests can run against recorded reports. */

import { Report, StatementEntry, statementAtLine } from "./report.js";

export interface InspectorDetail {
  kind: "obligation" | "assumed" | "meta" | "error" | "empty";
  title: string;
  lines: string[];
}

export function inspectLine(report: Report | null, line: number): InspectorDetail {
  if (!report) {
    return { kind: "empty", title: "", lines: [] };
  }
  const entry = statementAtLine(report, line);
  if (!entry) {
    return { kind: "empty", title: "", lines: [] };
  }
  return describe(entry);
}

export function describe(entry: StatementEntry): InspectorDetail {
  if (entry.status === "parse_error") {
    return {
      kind: "error",
      title: `parse error`,
      lines: entry.message ? [entry.message] : [],
    };
  }
  if (entry.status === "assumed") {
    return {
      kind: "assumed",
      title: `${entry.id}: assumed`,
      lines: ["This statement is taken as an assumption; nothing to prove."],
    };
  }
  if (!entry.tptp) {
    return {
      kind: "meta",
      title: `${entry.id}: ${entry.status}`,
      lines: [],
    };
  }
  const lines: string[] = [];
  if (entry.status === "proved" && entry.prover) {
    lines.push(`proved by ${entry.prover} in ${Math.round(entry.ms)} ms`);
  } else if (entry.status === "refuted") {
    lines.push(`refuted${entry.prover ? ` by ${entry.prover}` : ""}`);
  } else {
    lines.push("no prover could decide this obligation");
  }
  lines.push("", "% proof obligation (TPTP)");
  lines.push(...entry.tptp.trimEnd().split("\n"));
  if (entry.model) {
    lines.push("", "% countermodel");
    lines.push(...entry.model.split("\n"));
  }
  return {
    kind: "obligation",
    title: `${entry.id}: ${entry.status}`,
    lines,
  };
}
