/** Browser bootstrap: map canvas, review queue, attribute panel. */

import { ApiClient } from "./api.js";
import { decodeGridr } from "./gridr.js";
import { renderFeatures, renderRaster, renderSparkline, type Viewport } from "./render.js";
import { ReviewController, ViewState } from "./state.js";
import type { EncodedAttribute } from "./types.js";

const DEMO_SPEC = {
  task: "binary_classify",
  target_class: "class0",
  capability: "plus_agent",
  t_max: 36000,
  eval_interval: 600,
  seed: 7,
  world: { width: 32, height: 32, n_classes: 2, voronoi_sites: 12 },
};

async function boot(): Promise<void> {
  const canvas = document.getElementById("map") as HTMLCanvasElement;
  const panel = document.getElementById("panel") as HTMLElement;
  const queueEl = document.getElementById("queue") as HTMLElement;
  const sparkCanvas = document.getElementById("spark") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");

  const api = new ApiClient("");
  const { session_id } = await api.createSession(DEMO_SPEC, "live");
  const state = new ViewState(session_id);
  const review = new ReviewController(api, state);

  // Seed the demo queue: two manual labels, then propagation suggestions.
  await api.createFeature(session_id, "cell_000000", "class0");
  await api.createFeature(session_id, "cell_001023", "other");
  await api.propagate(session_id, 12);

  const viewport: Viewport = {
    minX: 0,
    minY: 0,
    maxX: 32,
    maxY: 32,
    canvasWidth: canvas.width,
    canvasHeight: canvas.height,
  };

  async function redraw(): Promise<void> {
    const tile = await api.rasterTile(session_id, "embeddings");
    renderRaster(ctx as never, decodeGridr(tile.data), viewport, 0.8);
    await review.refreshFeatures();
    renderFeatures(ctx as never, state.features.values(), viewport, state.selectedFeature);
    queueEl.textContent = `${state.suggestions.length} suggestions | ${state.pendingDecisions.length} pending (a=accept x=reject f=flush)`;
  }

  async function showAttributes(featureId: string): Promise<void> {
    state.selectedFeature = featureId;
    const feature = state.features.get(featureId);
    if (!feature) return;
    const agency = feature.properties.agency;
    panel.textContent = `${featureId}  label=${agency.label}  status=${agency.status}  origin=${agency.origin}`;
    const attrs = feature.properties.attributes ?? {};
    const sparkCtx = sparkCanvas.getContext("2d");
    for (const value of Object.values(attrs) as EncodedAttribute[]) {
      if (value.type === "series" && sparkCtx) {
        renderSparkline(sparkCtx as never, value, { x: 4, y: 8, w: 140, h: 36 });
      }
    }
  }

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const wx = ((event.clientX - rect.left) / canvas.width) * 32;
    const wy = 32 - ((event.clientY - rect.top) / canvas.height) * 32;
    const col = Math.floor(wx);
    const row = Math.floor(wy);
    const id = `cell_${String(row * 32 + col).padStart(6, "0")}`;
    if (state.features.has(id)) void showAttributes(id).then(redraw);
  });

  document.addEventListener("keydown", (event) => {
    void review.handleKey(event.key).then(redraw);
  });

  await review.refreshSuggestions();
  await redraw();
}

boot().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) banner.textContent = `session lost: ${err}`;
});
