/** Thin client over the verification service. */

import { Report } from "./report.js";

export interface LibraryEntry {
  name: string;
  source: string;
}

export async function verify(text: string, timeout?: number): Promise<Report> {
  const body: Record<string, unknown> = { text };
  if (timeout !== undefined) {
    body.options = { timeout };
  }
  const resp = await fetch("/api/verify", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) {
    const detail = await resp.text();
    throw new Error(`verification failed (${resp.status}): ${detail}`);
  }
  return (await resp.json()) as Report;
}

export async function libraries(): Promise<LibraryEntry[]> {
  const resp = await fetch("/api/libraries");
  if (!resp.ok) {
    throw new Error(`cannot list libraries (${resp.status})`);
  }
  return (await resp.json()) as LibraryEntry[];
}
