/**
 * Wires the drawing canvas, part dropdown, suggestion picker, undo, and
 * export button to the suggestion service.
 */

import { ApiError, fetchInitialStroke, fetchParts, SuggestionClient } from "./api.js";
import { DrawingCanvas } from "./canvas.js";
import { DuplicatePartError, SessionStore } from "./state.js";
import { exportSvg, svgParses } from "./svg.js";
import type { Dataset, StrokeData } from "./types.js";

export interface AppElements {
  canvas: HTMLCanvasElement;
  partSelect: HTMLSelectElement;
  commitButton: HTMLButtonElement;
  suggestButton: HTMLButtonElement;
  undoButton: HTMLButtonElement;
  redoButton: HTMLButtonElement;
  exportButton: HTMLButtonElement;
  variantsBox: HTMLElement;
  statusLine: HTMLElement;
}

export class App {
  store: SessionStore;
  drawing: DrawingCanvas;
  suggestions: SuggestionClient;
  pendingStrokes: StrokeData[] = [];

  constructor(
    private els: AppElements,
    private dataset: Dataset,
    private baseUrl: string,
  ) {
    this.store = new SessionStore(dataset);
    this.suggestions = new SuggestionClient({ baseUrl });
    this.drawing = new DrawingCanvas(els.canvas, (s) => this.pendingStrokes.push(s));
    els.commitButton.addEventListener("click", () => this.commitPending());
    els.suggestButton.addEventListener("click", () => void this.requestSuggestion());
    els.undoButton.addEventListener("click", () => this.apply(() => this.store.undo()));
    els.redoButton.addEventListener("click", () => this.apply(() => this.store.redo()));
    els.exportButton.addEventListener("click", () => this.download());
  }

  async start(): Promise<void> {
    const labels = await fetchParts({ baseUrl: this.baseUrl }, this.dataset);
    this.els.partSelect.innerHTML = ["eye", ...labels, "details"]
      .map((l) => `<option value="${l}">${l}</option>`)
      .join("");
    const stroke = await fetchInitialStroke({ baseUrl: this.baseUrl }, this.dataset);
    this.apply(() => this.store.setInitialStroke(stroke));
    this.status("draw the eye first, or ask for a suggestion");
  }

  private apply(fn: () => unknown): void {
    fn();
    this.refresh();
  }

  private status(text: string): void {
    this.els.statusLine.textContent = text;
  }

  commitPending(): void {
    if (!this.pendingStrokes.length) {
      this.status("draw something before committing a part");
      return;
    }
    const label = this.els.partSelect.value;
    try {
      this.store.commitPart({ label, strokes: this.pendingStrokes, source: "human" });
      this.pendingStrokes = [];
      this.status(`committed ${label}`);
    } catch (err) {
      if (err instanceof DuplicatePartError) {
        this.status(err.message);
        return; // state unchanged
      }
      throw err;
    }
    this.refresh();
  }

  async requestSuggestion(): Promise<void> {
    this.status("asking the model...");
    try {
      const suggestion = await this.suggestions.request(this.store.state, 8);
      if (suggestion === null) return; // superseded
      if (suggestion.label === "stop") {
        this.status("model thinks the sketch is complete");
        return;
      }
      this.store.setSuggestion(suggestion);
      this.status(`model proposes: ${suggestion.label}`);
    } catch (err) {
      if (err instanceof ApiError && err.status >= 500) {
        this.status("service unavailable, try again");
        return; // retry banner; state unchanged
      }
      throw err;
    }
    this.refresh();
  }

  acceptVariant(index: number): void {
    this.apply(() => this.store.acceptVariant(index));
    this.status("accepted the model's part");
  }

  dismissSuggestion(): void {
    this.apply(() => this.store.dismissSuggestion());
  }

  exportDocument(): string {
    const svg = exportSvg(this.store.state);
    if (!svgParses(svg)) throw new Error("export produced invalid SVG");
    return svg;
  }

  private download(): void {
    if (!this.store.state.initialStroke && this.store.state.parts.length === 0) {
      this.status("nothing to export yet");
      return;
    }
    const svg = this.exportDocument();
    const blob = new Blob([svg], { type: "image/svg+xml" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "sketch.svg";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  refresh(): void {
    const state = this.store.state;
    this.els.undoButton.disabled = !this.store.canUndo;
    this.els.redoButton.disabled = !this.store.canRedo;
    this.els.exportButton.disabled = !state.initialStroke && state.parts.length === 0;
    const box = this.els.variantsBox;
    box.innerHTML = "";
    const suggestion = state.pendingSuggestion;
    if (suggestion) {
      suggestion.variants.forEach((variant, i) => {
        const button = document.createElement("button");
        button.className = "variant";
        button.dataset.index = String(i);
        const img = document.createElement("img");
        img.src = `data:image/png;base64,${variant.rasterPngB64}`;
        button.appendChild(img);
        button.addEventListener("click", () => this.acceptVariant(i));
        box.appendChild(button);
      });
      const dismiss = document.createElement("button");
      dismiss.textContent = "dismiss";
      dismiss.className = "dismiss";
      dismiss.addEventListener("click", () => this.dismissSuggestion());
      box.appendChild(dismiss);
      this.drawing.setSuggestionOverlay(suggestion.variants[0]?.rasterPngB64 ?? null);
    } else {
      this.drawing.setSuggestionOverlay(null);
    }
    this.drawing.render(state);
  }
}

export function mount(dataset: Dataset = "birds", baseUrl = ""): App {
  const els: AppElements = {
    canvas: document.getElementById("sketch-canvas") as HTMLCanvasElement,
    partSelect: document.getElementById("part-select") as HTMLSelectElement,
    commitButton: document.getElementById("commit-part") as HTMLButtonElement,
    suggestButton: document.getElementById("suggest") as HTMLButtonElement,
    undoButton: document.getElementById("undo") as HTMLButtonElement,
    redoButton: document.getElementById("redo") as HTMLButtonElement,
    exportButton: document.getElementById("export") as HTMLButtonElement,
    variantsBox: document.getElementById("variants") as HTMLElement,
    statusLine: document.getElementById("status") as HTMLElement,
  };
  const app = new App(els, dataset, baseUrl);
  void app.start();
  return app;
}
