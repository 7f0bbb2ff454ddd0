import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { inspectLine } from "../src/inspector.js";
import { Report } from "../src/report.js";
import { insertSymbol } from "../src/symbols.js";

interface Fixture {
  text: string;
  report: Report;
}

function fixture(name: string): Fixture {
  const raw = readFileSync(join(__dirname, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as Fixture;
}

describe("inspector panel", () => {
  it("shows the obligation and winning prover for a proved step", () => {
    const fix = fixture("all_green");
    const leaf = fix.report.statements.find(
      (e) => e.status === "proved" && e.tptp,
    )!;
    const detail = inspectLine(fix.report, leaf.span!.startLine);
    expect(detail.kind).toBe("obligation");
    const body = detail.lines.join("\n");
    expect(body).toContain(`proved by ${leaf.prover}`);
    expect(body).toContain("fof(goal, conjecture");
  });

  it("shows the countermodel text for a refuted step", () => {
    const fix = fixture("countermodel");
    const leaf = fix.report.statements.find((e) => e.status === "refuted" && e.tptp)!;
    const detail = inspectLine(fix.report, leaf.span!.startLine);
    const body = detail.lines.join("\n");
    expect(body).toContain("% countermodel");
    expect(body).toContain("domain:");
  });

  it("notes assumptions on axiom lines", () => {
    const fix = fixture("all_green");
    const assumed = fix.report.statements.find((e) => e.status === "assumed")!;
    const detail = inspectLine(fix.report, assumed.span!.startLine);
    expect(detail.kind).toBe("assumed");
    expect(detail.title).toContain("assumed");
  });

  it("is empty outside any statement and without a report", () => {
    const fix = fixture("all_green");
    expect(inspectLine(fix.report, 9999).kind).toBe("empty");
    expect(inspectLine(null, 1).kind).toBe("empty");
  });
});

describe("symbol palette insertion", () => {
  it("inserts at the caret mid-word", () => {
    const r = insertSymbol("ab", 1, 1, "∘");
    expect(r.text).toBe("a∘b");
    expect(r.caret).toBe(2);
  });

  it("inserts into an empty buffer", () => {
    const r = insertSymbol("", 0, 0, "→");
    expect(r.text).toBe("→");
    expect(r.caret).toBe(1);
  });

  it("repeated insertion advances the caret", () => {
    let state = insertSymbol("", 0, 0, "⁻¹");
    state = insertSymbol(state.text, state.caret, state.caret, "⁻¹");
    expect(state.text).toBe("⁻¹⁻¹");
    expect(state.caret).toBe(4);
  });

  it("replaces a selection", () => {
    const r = insertSymbol("x年y", 1, 2, "∈");
    expect(r.text).toBe("x∈y");
  });
});
