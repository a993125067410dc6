/**
 * Typed client for the suggestion service.
 *
 * Requests mirror the server's pydantic schemas exactly; responses come
 * back as parsed JSON.  `SuggestionClient` tags each request with a
 * sequence number so answers to superseded requests are discarded.
 */

import type { Dataset, SessionState, StrokeData, Suggestion } from "./types.js";

export interface ApiConfig {
  baseUrl: string;
  fetchFn?: typeof fetch;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function post(cfg: ApiConfig, path: string, body: unknown): Promise<any> {
  const doFetch = cfg.fetchFn ?? fetch;
  const response = await doFetch(`${cfg.baseUrl}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
  return response.json();
}

export async function fetchParts(cfg: ApiConfig, dataset: Dataset): Promise<string[]> {
  const doFetch = cfg.fetchFn ?? fetch;
  const response = await doFetch(`${cfg.baseUrl}/v1/parts/${dataset}`);
  if (!response.ok) throw new ApiError(response.status, await response.text());
  return (await response.json()).labels;
}

export async function fetchInitialStroke(
  cfg: ApiConfig,
  dataset: Dataset,
  seed?: number,
): Promise<StrokeData> {
  const data = await post(cfg, "/v1/strokes/initial", { dataset, seed });
  return { points: data.stroke.points, widthPx: data.stroke.width_px };
}

/** Canonical partial-sketch payload for /v1/suggest. */
export function suggestPayload(state: SessionState, nVariants: number, seed?: number) {
  if (!state.initialStroke) throw new Error("session has no initial stroke");
  return {
    dataset: state.dataset,
    initial_stroke: state.initialStroke.points,
    parts: state.parts
      .filter((p) => p.source === "human" || p.strokes.length > 0)
      .map((p) => ({ label: p.label, strokes: p.strokes.map((s) => s.points) })),
    n_variants: nVariants,
    seed,
  };
}

function parseSuggestion(data: any): Suggestion {
  return {
    label: data.label,
    variants: (data.variants ?? []).map((v: any) => ({
      rasterPngB64: v.raster_png_b64,
      paths: v.paths,
    })),
    probabilities: data.probabilities ?? {},
  };
}

export class SuggestionClient {
  private sequence = 0;

  constructor(private cfg: ApiConfig) {}

  /**
   * Request a suggestion; resolves null when a newer request was issued
   * before this response arrived (the stale answer is discarded).
   */
  async request(
    state: SessionState,
    nVariants: number,
    seed?: number,
  ): Promise<Suggestion | null> {
    const ticket = ++this.sequence;
    const data = await post(this.cfg, "/v1/suggest", suggestPayload(state, nVariants, seed));
    if (ticket !== this.sequence) return null;
    return parseSuggestion(data);
  }
}
