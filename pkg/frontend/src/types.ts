/** Payload types for the /v1 session API. */

export type LabelStatus = "suggested" | "accepted" | "rejected" | "committed";

export interface AgencyProps {
  label: string | null;
  status: LabelStatus;
  origin: string;
}

export interface GeoJsonFeature {
  type: "Feature";
  id: string;
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: {
    agency: AgencyProps;
    attributes: Record<string, EncodedAttribute>;
  };
}

export interface GeoJsonLayer {
  type: "FeatureCollection";
  name: string;
  crs: string;
  features: GeoJsonFeature[];
}

export interface EncodedAttribute {
  type: "text" | "number" | "category" | "series" | "image_ref";
  value?: string | number;
  unit?: string;
  tags?: string[];
  name?: string;
  points?: [number, number][];
  artifact_id?: string;
}

export interface RasterTile {
  name: string;
  encoding: "gridr-base64";
  width: number;
  height: number;
  full_width: number;
  full_height: number;
  data: string;
}

export interface SuggestionEntry {
  item_id: string;
  label: string | null;
  origin: string | null;
  score: number | null;
}

export interface SuggestionsPage {
  cursor: number;
  total_open: number;
  suggestions: SuggestionEntry[];
}

export interface SessionState {
  session_id: string;
  capability: string;
  now: number;
  t_max: number;
  done: boolean;
  committed: number;
  suggestions_open: number;
  compute_cost: number;
  actor: string;
}

export interface QualityPoint {
  t: number;
  q: number;
  metric: string;
}

export interface LiveMetrics {
  samples: QualityPoint[];
  now: number;
}

export interface Decision {
  item_id: string;
  accept: boolean;
}
