/**
 * Drawing surface: pointer events accumulate a freehand stroke in
 * normalized coordinates; rendering draws the committed sketch, the
 * in-progress stroke, and any pending suggestion overlay.
 */

import { downsamplePoints } from "./state.js";
import type { Point, SessionState, StrokeData } from "./types.js";

const SUGGESTION_COLOR = "rgba(214, 79, 44, 0.55)";

export class DrawingCanvas {
  private drawing = false;
  private current: Point[] = [];
  private overlay: HTMLImageElement | null = null;

  constructor(
    public canvas: HTMLCanvasElement,
    private onStroke: (stroke: StrokeData) => void,
    public widthPx = 2,
  ) {
    canvas.addEventListener("pointerdown", (e) => this.begin(e));
    canvas.addEventListener("pointermove", (e) => this.extend(e));
    canvas.addEventListener("pointerup", () => this.finish());
    canvas.addEventListener("pointerleave", () => this.finish());
  }

  private toNormalized(e: PointerEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    const x = (e.clientX - rect.left) / rect.width;
    const y = (e.clientY - rect.top) / rect.height;
    return [Math.min(1, Math.max(0, x)), Math.min(1, Math.max(0, y))];
  }

  begin(e: PointerEvent): void {
    this.drawing = true;
    this.current = [this.toNormalized(e)];
  }

  extend(e: PointerEvent): void {
    if (!this.drawing) return;
    const p = this.toNormalized(e);
    const last = this.current[this.current.length - 1];
    if (!last || last[0] !== p[0] || last[1] !== p[1]) this.current.push(p);
  }

  finish(): void {
    if (!this.drawing) return;
    this.drawing = false;
    if (this.current.length >= 2) {
      this.onStroke({ points: downsamplePoints(this.current), widthPx: this.widthPx });
    }
    this.current = [];
  }

  setSuggestionOverlay(pngB64: string | null): void {
    if (!pngB64) {
      this.overlay = null;
      return;
    }
    const img = new Image();
    img.src = `data:image/png;base64,${pngB64}`;
    this.overlay = img;
  }

  render(state: SessionState): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const size = this.canvas.width;
    ctx.clearRect(0, 0, size, size);
    ctx.fillStyle = "#fff";
    ctx.fillRect(0, 0, size, size);
    ctx.lineCap = "round";
    ctx.lineJoin = "round";

    const paint = (stroke: StrokeData, color: string) => {
      if (stroke.points.length < 2) return;
      ctx.strokeStyle = color;
      ctx.lineWidth = (stroke.widthPx / 64) * size;
      ctx.beginPath();
      ctx.moveTo(stroke.points[0][0] * size, stroke.points[0][1] * size);
      for (const [x, y] of stroke.points.slice(1)) ctx.lineTo(x * size, y * size);
      ctx.stroke();
    };

    if (state.initialStroke) paint(state.initialStroke, "#888");
    for (const part of state.parts) {
      for (const stroke of part.strokes) paint(stroke, "#000");
      if (part.source === "model" && part.rasterPngB64) {
        const img = new Image();
        img.src = `data:image/png;base64,${part.rasterPngB64}`;
        try {
          ctx.drawImage(img, 0, 0, size, size);
        } catch {
          // jsdom has no image decoding; vector strokes still render.
        }
      }
    }
    if (this.overlay) {
      ctx.globalAlpha = 0.55;
      ctx.fillStyle = SUGGESTION_COLOR;
      try {
        ctx.drawImage(this.overlay, 0, 0, size, size);
      } catch {
        // ignore in non-browser environments
      }
      ctx.globalAlpha = 1.0;
    }
    for (const [x, y] of this.current) {
      ctx.fillStyle = "#000";
      ctx.fillRect(x * size - 1, y * size - 1, 2, 2);
    }
  }
}
