/** The editor shell: a textarea with a status gutter, the symbol palette,
 * and the inspector panel.  All state derives from the last report; editing
 * invalidates it (stale green lines must never survive a change). */

import { verify } from "./api.js";
import { InspectorDetail, inspectLine } from "./inspector.js";
import { LineColor, Report, lineDecorations } from "./report.js";
import { PALETTE, insertSymbol } from "./symbols.js";

export interface EditorState {
  buffer: string;
  report: Report | null;
  selectedLine: number | null;
  pending: boolean;
  error: string | null;
}

export class Editor {
  state: EditorState = {
    buffer: "",
    report: null,
    selectedLine: null,
    pending: false,
    error: null,
  };

  private textarea: HTMLTextAreaElement;
  private gutter: HTMLElement;
  private panel: HTMLElement;
  private banner: HTMLElement;
  private button: HTMLButtonElement;
  private statusLine: HTMLElement;

  constructor(root: HTMLElement) {
    root.innerHTML = `
      <div class="toolbar">
        <span class="palette"></span>
        <button class="verify">verify</button>
        <span class="overall"></span>
      </div>
      <div class="banner hidden"></div>
      <div class="workspace">
        <div class="gutter"></div>
        <textarea spellcheck="false" autocomplete="off"></textarea>
      </div>
      <pre class="inspector"></pre>`;
    this.textarea = root.querySelector("textarea")!;
    this.gutter = root.querySelector(".gutter")!;
    this.panel = root.querySelector(".inspector")!;
    this.banner = root.querySelector(".banner")!;
    this.button = root.querySelector(".verify")!;
    this.statusLine = root.querySelector(".overall")!;

    const palette = root.querySelector(".palette")!;
    for (const sym of PALETTE) {
      const b = document.createElement("button");
      b.textContent = sym;
      b.className = "sym";
      b.addEventListener("click", () => this.insert(sym));
      palette.appendChild(b);
    }

    this.textarea.addEventListener("input", () => {
      this.state.buffer = this.textarea.value;
      this.clearDecorations();
    });
    this.textarea.addEventListener("scroll", () => {
      this.gutter.scrollTop = this.textarea.scrollTop;
    });
    this.textarea.addEventListener("click", () => this.selectCaretLine());
    this.textarea.addEventListener("keyup", () => this.selectCaretLine());
    this.button.addEventListener("click", () => void this.verifyAction());
    this.renderGutter();
  }

  setBuffer(text: string): void {
    this.textarea.value = text;
    this.state.buffer = text;
    this.clearDecorations();
  }

  insert(symbol: string): void {
    const { text, caret } = insertSymbol(
      this.textarea.value,
      this.textarea.selectionStart,
      this.textarea.selectionEnd,
      symbol,
    );
    this.textarea.value = text;
    this.textarea.setSelectionRange(caret, caret);
    this.textarea.focus();
    this.state.buffer = text;
    this.clearDecorations();
  }

  async verifyAction(): Promise<void> {
    if (this.state.pending) return;
    this.state.pending = true;
    this.state.error = null;
    this.button.disabled = true;
    this.button.textContent = "verifying…";
    this.renderBanner();
    try {
      const report = await verify(this.state.buffer);
      this.state.report = report;
      this.statusLine.textContent = report.verified
        ? `verified (${Math.round(report.elapsedMs)} ms)`
        : `not verified (${Math.round(report.elapsedMs)} ms)`;
      this.statusLine.className = `overall ${report.verified ? "green" : "red"}`;
    } catch (err) {
      // decorations stay as they were; only the banner reports the failure
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.state.pending = false;
      this.button.disabled = false;
      this.button.textContent = "verify";
      this.renderBanner();
      this.renderGutter();
      this.renderPanel();
    }
  }

  clearDecorations(): void {
    this.state.report = null;
    this.state.selectedLine = null;
    this.statusLine.textContent = "";
    this.statusLine.className = "overall";
    this.renderGutter();
    this.renderPanel();
  }

  private selectCaretLine(): void {
    const upto = this.textarea.value.slice(0, this.textarea.selectionStart);
    this.state.selectedLine = upto.split("\n").length;
    this.renderPanel();
  }

  private decorations(): Map<number, LineColor> {
    if (!this.state.report) return new Map();
    const lines = this.state.buffer.split("\n").length;
    return lineDecorations(this.state.report, lines);
  }

  renderGutter(): void {
    const lines = this.state.buffer.split("\n").length;
    const deco = this.decorations();
    const rows: string[] = [];
    for (let i = 1; i <= lines; i++) {
      const color = deco.get(i) ?? "plain";
      rows.push(`<div class="row ${color}">${i}</div>`);
    }
    this.gutter.innerHTML = rows.join("");
  }

  renderPanel(): void {
    const detail: InspectorDetail = inspectLine(
      this.state.report,
      this.state.selectedLine ?? -1,
    );
    if (detail.kind === "empty") {
      this.panel.textContent = "";
      return;
    }
    this.panel.textContent = [detail.title, ...detail.lines].join("\n");
  }

  private renderBanner(): void {
    if (this.state.error) {
      this.banner.textContent = this.state.error;
      this.banner.className = "banner";
    } else {
      this.banner.textContent = "";
      this.banner.className = "banner hidden";
    }
  }
}
