/**
 * Session state: immutable snapshots with an undo/redo stack.
 *
 * Every mutation produces a frozen copy; undo/redo just move a cursor
 * over the history, so restoring is exact by construction.
 */

import type {
  CommittedPart,
  Dataset,
  SessionState,
  StrokeData,
  Suggestion,
  Point,
} from "./types.js";

export class DuplicatePartError extends Error {}

export function emptySession(dataset: Dataset): SessionState {
  return Object.freeze({
    dataset,
    initialStroke: null,
    parts: Object.freeze([]) as readonly CommittedPart[],
    pendingSuggestion: null,
  });
}

/** Clamp coordinates to the unit canvas. */
export function normalizeStroke(stroke: StrokeData): StrokeData {
  const points = stroke.points.map(
    ([x, y]): Point => [Math.min(1, Math.max(0, x)), Math.min(1, Math.max(0, y))],
  );
  return { points, widthPx: stroke.widthPx };
}

/** Uniformly thin a freehand polyline down to at most maxPoints. */
export function downsamplePoints(points: Point[], maxPoints = 256): Point[] {
  if (points.length <= maxPoints) return points.slice();
  const out: Point[] = [];
  const step = (points.length - 1) / (maxPoints - 1);
  for (let i = 0; i < maxPoints; i++) {
    out.push(points[Math.round(i * step)]);
  }
  return out;
}

export function committedLabels(state: SessionState): string[] {
  return state.parts.filter((p) => p.label !== "details").map((p) => p.label);
}

export class SessionStore {
  private history: SessionState[];
  private cursor: number;

  constructor(dataset: Dataset) {
    this.history = [emptySession(dataset)];
    this.cursor = 0;
  }

  get state(): SessionState {
    return this.history[this.cursor];
  }

  get canUndo(): boolean {
    return this.cursor > 0;
  }

  get canRedo(): boolean {
    return this.cursor < this.history.length - 1;
  }

  private push(next: SessionState): SessionState {
    this.history = this.history.slice(0, this.cursor + 1);
    this.history.push(Object.freeze(next));
    this.cursor++;
    return this.state;
  }

  undo(): SessionState {
    if (this.canUndo) this.cursor--;
    return this.state;
  }

  redo(): SessionState {
    if (this.canRedo) this.cursor++;
    return this.state;
  }

  setInitialStroke(stroke: StrokeData): SessionState {
    return this.push({ ...this.state, initialStroke: normalizeStroke(stroke) });
  }

  /** Commit a human- or model-authored part; duplicate labels are rejected. */
  commitPart(part: CommittedPart): SessionState {
    const labels = committedLabels(this.state);
    if (part.label !== "details" && labels.includes(part.label)) {
      throw new DuplicatePartError(`part "${part.label}" is already drawn`);
    }
    const normalized: CommittedPart = {
      ...part,
      strokes: part.strokes.map(normalizeStroke),
    };
    return this.push({
      ...this.state,
      parts: Object.freeze([...this.state.parts, normalized]),
      pendingSuggestion: null,
    });
  }

  setSuggestion(suggestion: Suggestion | null): SessionState {
    return this.push({ ...this.state, pendingSuggestion: suggestion });
  }

  /** Accept one suggestion variant as a model-authored part. */
  acceptVariant(index: number): SessionState {
    const suggestion = this.state.pendingSuggestion;
    if (!suggestion || index < 0 || index >= suggestion.variants.length) {
      throw new Error("no such suggestion variant");
    }
    const variant = suggestion.variants[index];
    return this.commitPart({
      label: suggestion.label,
      strokes: [],
      source: "model",
      rasterPngB64: variant.rasterPngB64,
      paths: variant.paths,
    });
  }

  dismissSuggestion(): SessionState {
    return this.push({ ...this.state, pendingSuggestion: null });
  }
}
