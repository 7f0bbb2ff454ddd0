/** The symbol palette and caret-preserving insertion. */

export const PALETTE = ["→", "∈", "∘", "⊆", "∪", "⁻¹", "ᶜ"] as const;

export interface Insertion {
  text: string;
  caret: number;
}

/** Insert `symbol` at the caret (replacing any selection); the new caret
 * lands after the inserted symbol. */
export function insertSymbol(
  text: string,
  selectionStart: number,
  selectionEnd: number,
  symbol: string,
): Insertion {
  const start = Math.max(0, Math.min(selectionStart, text.length));
  const end = Math.max(start, Math.min(selectionEnd, text.length));
  const out = text.slice(0, start) + symbol + text.slice(end);
  return { text: out, caret: start + symbol.length };
}
