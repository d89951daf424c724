/** View state and the review controller.
 *
 * Decisions buffer locally and flush atomically as ONE decide call; an
 * optimistic status update is rolled back if the server reports the
 * candidate stale (409).
 */

import { ApiClient, StaleCandidateError } from "./api.js";
import type { Decision, GeoJsonFeature, LabelStatus, SuggestionEntry } from "./types.js";

export interface LayerVisibility {
  name: string;
  opacity: number;
  visible: boolean;
}

export class ViewState {
  sessionId: string;
  layers: LayerVisibility[] = [];
  suggestionCursor = 0;
  selectedFeature: string | null = null;
  pendingDecisions: Decision[] = [];
  suggestions: SuggestionEntry[] = [];
  features = new Map<string, GeoJsonFeature>();

  constructor(sessionId: string) {
    this.sessionId = sessionId;
  }

  featureStatus(itemId: string): LabelStatus | null {
    return this.features.get(itemId)?.properties.agency.status ?? null;
  }

  setFeatures(features: GeoJsonFeature[]): void {
    this.features.clear();
    for (const f of features) this.features.set(f.id, f);
  }
}

export class ReviewController {
  constructor(
    private api: ApiClient,
    private state: ViewState,
  ) {}

  /** Queue a decision and optimistically restyle the feature. */
  queueDecision(itemId: string, accept: boolean): void {
    if (this.state.pendingDecisions.some((d) => d.item_id === itemId)) return;
    this.state.pendingDecisions.push({ item_id: itemId, accept });
    const feature = this.state.features.get(itemId);
    if (feature) {
      feature.properties.agency.status = accept ? "committed" : "rejected";
    }
  }

  /** One network call carrying every buffered decision. */
  async flush(): Promise<number> {
    const batch = this.state.pendingDecisions;
    if (batch.length === 0) return 0;
    this.state.pendingDecisions = [];
    try {
      await this.api.decide(this.state.sessionId, batch);
    } catch (err) {
      // Roll back the optimistic restyle; the queue is refreshed by caller.
      for (const decision of batch) {
        const feature = this.state.features.get(decision.item_id);
        if (feature) feature.properties.agency.status = "suggested";
      }
      if (err instanceof StaleCandidateError) return 0;
      throw err;
    }
    this.state.suggestions = this.state.suggestions.filter(
      (s) => !batch.some((d) => d.item_id === s.item_id),
    );
    return batch.length;
  }

  /** Keyboard review: a=accept, x=reject, f=flush, j/k move selection. */
  async handleKey(key: string): Promise<void> {
    const current = this.state.suggestions[0];
    switch (key) {
      case "a":
        if (current) this.queueDecision(current.item_id, true);
        this.state.suggestions = this.state.suggestions.slice(1);
        break;
      case "x":
        if (current) this.queueDecision(current.item_id, false);
        this.state.suggestions = this.state.suggestions.slice(1);
        break;
      case "f":
        await this.flush();
        break;
      default:
        break;
    }
  }

  async refreshSuggestions(): Promise<void> {
    const page = await this.api.suggestions(this.state.sessionId, 0, 200);
    this.state.suggestions = page.suggestions;
    this.state.suggestionCursor = page.cursor;
  }

  async refreshFeatures(layer = "work"): Promise<void> {
    const collection = await this.api.vectorLayer(this.state.sessionId, layer);
    this.state.setFeatures(collection.features);
  }
}
