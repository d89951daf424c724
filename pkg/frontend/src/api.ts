/** Typed client for the session service. Everything goes through /v1. */

import type {
  Decision,
  GeoJsonLayer,
  LiveMetrics,
  RasterTile,
  SessionState,
  SuggestionsPage,
} from "./types.js";

/** Every path template this client may issue (contract-tested vs schema). */
export const ENDPOINTS = [
  "/v1/sessions",
  "/v1/sessions/{session_id}/state",
  "/v1/sessions/{session_id}/layers",
  "/v1/sessions/{session_id}/layers/{name}",
  "/v1/sessions/{session_id}/suggestions",
  "/v1/sessions/{session_id}/suggestions/decide",
  "/v1/sessions/{session_id}/features",
  "/v1/sessions/{session_id}/features/{feature_id}/attributes",
  "/v1/sessions/{session_id}/propagate",
  "/v1/sessions/{session_id}/dual-loop/step",
  "/v1/sessions/{session_id}/dual-loop/suggest",
  "/v1/sessions/{session_id}/metrics/live",
  "/v1/sessions/{session_id}/done",
] as const;

export class StaleCandidateError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "StaleCandidateError";
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  /** Count of requests issued, keyed by path template (test hook). */
  readonly requestLog: string[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async call<T>(template: string, path: string, init?: RequestInit): Promise<T> {
    this.requestLog.push(template);
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (response.status === 409) {
      const body = await response.json().catch(() => ({ detail: "stale" }));
      throw new StaleCandidateError(String(body.detail ?? "stale candidate"));
    }
    if (!response.ok) {
      const body = await response.json().catch(() => ({ detail: response.statusText }));
      throw new ApiError(response.status, String(body.detail ?? "error"));
    }
    return (await response.json()) as T;
  }

  createSession(spec: unknown, actor = "live"): Promise<{ session_id: string }> {
    return this.call("/v1/sessions", "/v1/sessions", {
      method: "POST",
      body: JSON.stringify({ spec, actor }),
    });
  }

  state(sessionId: string): Promise<SessionState> {
    return this.call(
      "/v1/sessions/{session_id}/state",
      `/v1/sessions/${sessionId}/state`,
    );
  }

  layers(sessionId: string): Promise<{ rasters: string[]; vectors: string[] }> {
    return this.call(
      "/v1/sessions/{session_id}/layers",
      `/v1/sessions/${sessionId}/layers`,
    );
  }

  vectorLayer(sessionId: string, name: string): Promise<GeoJsonLayer> {
    return this.call(
      "/v1/sessions/{session_id}/layers/{name}",
      `/v1/sessions/${sessionId}/layers/${name}`,
    );
  }

  rasterTile(sessionId: string, name: string): Promise<RasterTile> {
    return this.call(
      "/v1/sessions/{session_id}/layers/{name}",
      `/v1/sessions/${sessionId}/layers/${name}`,
    );
  }

  suggestions(sessionId: string, cursor = 0, limit = 100): Promise<SuggestionsPage> {
    return this.call(
      "/v1/sessions/{session_id}/suggestions",
      `/v1/sessions/${sessionId}/suggestions?cursor=${cursor}&limit=${limit}`,
    );
  }

  decide(sessionId: string, decisions: Decision[], commit = true): Promise<SessionState> {
    return this.call(
      "/v1/sessions/{session_id}/suggestions/decide",
      `/v1/sessions/${sessionId}/suggestions/decide`,
      { method: "POST", body: JSON.stringify({ decisions, duration: 0, commit }) },
    );
  }

  createFeature(sessionId: string, itemId: string, label: string): Promise<unknown> {
    return this.call(
      "/v1/sessions/{session_id}/features",
      `/v1/sessions/${sessionId}/features`,
      { method: "POST", body: JSON.stringify({ item_id: itemId, label, duration: 0 }) },
    );
  }

  attachAttributes(sessionId: string, featureId: string, request: object): Promise<unknown> {
    return this.call(
      "/v1/sessions/{session_id}/features/{feature_id}/attributes",
      `/v1/sessions/${sessionId}/features/${featureId}/attributes`,
      { method: "POST", body: JSON.stringify(request) },
    );
  }

  propagate(sessionId: string, k: number): Promise<{ candidates: unknown[] }> {
    return this.call(
      "/v1/sessions/{session_id}/propagate",
      `/v1/sessions/${sessionId}/propagate`,
      { method: "POST", body: JSON.stringify({ k, duration: 0 }) },
    );
  }

  dualStep(sessionId: string): Promise<{ surface_artifact: string; review_queue: string[] }> {
    return this.call(
      "/v1/sessions/{session_id}/dual-loop/step",
      `/v1/sessions/${sessionId}/dual-loop/step`,
      { method: "POST", body: JSON.stringify({ duration: 0, review_budget: 10 }) },
    );
  }

  dualSuggest(sessionId: string, threshold: number, limit: number): Promise<{ suggested: string[] }> {
    return this.call(
      "/v1/sessions/{session_id}/dual-loop/suggest",
      `/v1/sessions/${sessionId}/dual-loop/suggest`,
      { method: "POST", body: JSON.stringify({ threshold, limit, duration: 0 }) },
    );
  }

  liveMetrics(sessionId: string): Promise<LiveMetrics> {
    return this.call(
      "/v1/sessions/{session_id}/metrics/live",
      `/v1/sessions/${sessionId}/metrics/live`,
    );
  }

  done(sessionId: string): Promise<Record<string, unknown>> {
    return this.call(
      "/v1/sessions/{session_id}/done",
      `/v1/sessions/${sessionId}/done`,
      { method: "POST", body: JSON.stringify({}) },
    );
  }
}
