/**
 * SVG export: one labeled group per committed part.
 *
 * Human parts serialize their vector strokes as polyline paths; model
 * parts reuse the traced cubic paths the service returned (scaled from
 * its 128-unit trace space into the export canvas).
 */

import type { SessionState, StrokeData } from "./types.js";

const TRACE_SPACE = 128; // service traces rasters at 64 x scale 2

function fmt(v: number): string {
  return v.toFixed(3);
}

function strokePath(stroke: StrokeData, size: number): string {
  const pts = stroke.points.map(([x, y]) => `${fmt(x * size)} ${fmt(y * size)}`);
  return `M ${pts[0]} L ${pts.slice(1).join(" L ")}`;
}

export function exportSvg(state: SessionState, size = 512): string {
  const groups: string[] = [];
  if (state.initialStroke) {
    groups.push(partGroup("initial_stroke", "human", [state.initialStroke], [], size));
  }
  for (const part of state.parts) {
    groups.push(partGroup(part.label, part.source, part.strokes, part.paths ?? [], size));
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}" ` +
    `width="${size}" height="${size}">\n` +
    groups.join("\n") +
    "\n</svg>\n"
  );
}

function partGroup(
  label: string,
  source: string,
  strokes: StrokeData[],
  tracedPaths: string[],
  size: number,
): string {
  const body: string[] = [];
  for (const stroke of strokes) {
    if (stroke.points.length < 2) continue;
    body.push(
      `    <path d="${strokePath(stroke, size)}" fill="none" stroke="#000" ` +
        `stroke-width="${fmt((stroke.widthPx * size) / 64)}" stroke-linecap="round"/>`,
    );
  }
  const scale = size / TRACE_SPACE;
  for (const d of tracedPaths) {
    body.push(`    <path d="${d}" transform="scale(${fmt(scale)})" fill="#000"/>`);
  }
  return `  <g data-part="${label}" data-source="${source}">\n${body.join("\n")}\n  </g>`;
}

/** True when the document parses as well-formed SVG. */
export function svgParses(text: string, parser?: DOMParser): boolean {
  const p = parser ?? new DOMParser();
  const doc = p.parseFromString(text, "image/svg+xml");
  return doc.getElementsByTagName("parsererror").length === 0;
}
