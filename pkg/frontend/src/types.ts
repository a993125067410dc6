export type Point = [number, number];

export type Dataset = "birds" | "creatures";

export interface StrokeData {
  points: Point[];
  widthPx: number;
}

export type PartSource = "human" | "model";

export interface CommittedPart {
  label: string;
  strokes: StrokeData[];
  source: PartSource;
  /** Raster + traced paths as returned by the service for model parts. */
  rasterPngB64?: string;
  paths?: string[];
}

export interface SuggestionVariant {
  rasterPngB64: string;
  paths: string[];
}

export interface Suggestion {
  label: string;
  variants: SuggestionVariant[];
  probabilities: Record<string, number>;
}

export interface SessionState {
  dataset: Dataset;
  initialStroke: StrokeData | null;
  parts: readonly CommittedPart[];
  pendingSuggestion: Suggestion | null;
}
