/** Canvas rendering: raster tiles, vector features, attribute sparklines.
 *
 * Draws through a minimal 2D-context interface so tests can record calls;
 * the browser passes a real CanvasRenderingContext2D.
 */

import type { DecodedTile } from "./gridr.js";
import type { EncodedAttribute, GeoJsonFeature } from "./types.js";

export interface Ctx2D {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Viewport {
  /** World extent mapped onto the canvas. */
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
  canvasWidth: number;
  canvasHeight: number;
}

export const FEATURE_STYLE = {
  suggested: { stroke: "#f59e0b", fill: "rgba(245, 158, 11, 0.25)", width: 2 },
  accepted: { stroke: "#10b981", fill: "rgba(16, 185, 129, 0.25)", width: 2 },
  committed: { stroke: "#059669", fill: "rgba(5, 150, 105, 0.45)", width: 1 },
  rejected: { stroke: "#9ca3af", fill: "rgba(156, 163, 175, 0.15)", width: 1 },
} as const;

export function worldToCanvas(
  viewport: Viewport,
  x: number,
  y: number,
): [number, number] {
  const sx = ((x - viewport.minX) / (viewport.maxX - viewport.minX)) * viewport.canvasWidth;
  // Canvas y grows downward; world y grows upward.
  const sy =
    viewport.canvasHeight -
    ((y - viewport.minY) / (viewport.maxY - viewport.minY)) * viewport.canvasHeight;
  return [sx, sy];
}

function grayscale(value: number, lo: number, hi: number): string {
  const t = hi > lo ? (value - lo) / (hi - lo) : 0;
  const v = Math.round(255 * Math.min(1, Math.max(0, t)));
  return `rgb(${v},${v},${v})`;
}

/** Paint the first band of a tile as a grayscale cell grid. */
export function renderRaster(
  ctx: Ctx2D,
  tile: DecodedTile,
  viewport: Viewport,
  opacity = 1.0,
): number {
  const first = tile.bands.values().next();
  if (first.done) return 0;
  const values = first.value;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v === tile.nodata) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  ctx.globalAlpha = opacity;
  let painted = 0;
  const cellW = viewport.canvasWidth / tile.width;
  const cellH = viewport.canvasHeight / tile.height;
  for (let row = 0; row < tile.height; row++) {
    for (let col = 0; col < tile.width; col++) {
      const v = values[row * tile.width + col];
      if (v === undefined || v === tile.nodata) continue;
      ctx.fillStyle = grayscale(v, lo, hi);
      // Row 0 is the bottom row in GRIDR; flip into canvas space.
      ctx.fillRect(col * cellW, (tile.height - 1 - row) * cellH, cellW + 0.5, cellH + 0.5);
      painted++;
    }
  }
  ctx.globalAlpha = 1.0;
  return painted;
}

function tracePolygon(ctx: Ctx2D, rings: number[][][], viewport: Viewport): void {
  ctx.beginPath();
  for (const ring of rings) {
    ring.forEach((pt, i) => {
      const [px, py] = pt;
      if (px === undefined || py === undefined) return;
      const [sx, sy] = worldToCanvas(viewport, px, py);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.closePath();
  }
}

/** Draw features styled by label status; returns count per status. */
export function renderFeatures(
  ctx: Ctx2D,
  features: Iterable<GeoJsonFeature>,
  viewport: Viewport,
  selectedId: string | null = null,
): Record<string, number> {
  const drawn: Record<string, number> = {};
  for (const feature of features) {
    const status = feature.properties.agency.status;
    const style = FEATURE_STYLE[status];
    tracePolygon(ctx, feature.geometry.coordinates, viewport);
    ctx.fillStyle = style.fill;
    ctx.fill();
    ctx.strokeStyle = feature.id === selectedId ? "#2563eb" : style.stroke;
    ctx.lineWidth = feature.id === selectedId ? style.width + 2 : style.width;
    ctx.stroke();
    drawn[status] = (drawn[status] ?? 0) + 1;
  }
  return drawn;
}

/** Tiny time-series sparkline for the attribute evidence panel. */
export function renderSparkline(
  ctx: Ctx2D,
  attribute: EncodedAttribute,
  box: { x: number; y: number; w: number; h: number },
): void {
  if (attribute.type !== "series" || !attribute.points || attribute.points.length === 0) return;
  const points = attribute.points;
  const ts = points.map((p) => p[0]);
  const vs = points.map((p) => p[1]);
  const t0 = Math.min(...ts);
  const t1 = Math.max(...ts);
  const v0 = Math.min(...vs);
  const v1 = Math.max(...vs);
  ctx.beginPath();
  points.forEach(([t, v], i) => {
    const sx = box.x + ((t - t0) / Math.max(1, t1 - t0)) * box.w;
    const sy = box.y + box.h - ((v - v0) / Math.max(1e-9, v1 - v0)) * box.h;
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.strokeStyle = "#2563eb";
  ctx.lineWidth = 1;
  ctx.stroke();
  if (attribute.name) ctx.fillText(attribute.name, box.x, box.y - 2);
}
