// Wire types for the nlstplan HTTP JSON API (see the service's JSON schema).

export interface TaggedSpan {
  text: string;
  label: "TIME" | "NUMBER" | "CARDINAL" | "QUANTITY" | "INFO";
  start: number;
  end: number;
}

export interface Extraction {
  relations: string[];
  locations: { id: string; name: string; kind: string }[];
  objects: { relation: string; tuple: number; name: string }[];
  k: number | null;
  distance_m: number | null;
  period: [number, number] | null;
  nearest_neighbor: boolean;
  aggregate: string | null;
  predicate: string | null;
}

export interface Trace {
  tagged_spans: TaggedSpan[];
  extraction: Extraction;
  query_type: string;
  scores: Record<string, number>;
}

export interface TreeNode {
  kind: string;
  children: TreeNode[];
  [param: string]: unknown;
}

export interface GeoFeature {
  type: "Feature";
  geometry: { type: string; coordinates: unknown } | null;
  properties: Record<string, unknown>;
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: GeoFeature[];
}

export interface Results {
  schema: { name: string; kind: string }[];
  rows: unknown[][];
  geojson: FeatureCollection;
}

export interface Timing {
  baseline_ms: number;
  optimized_ms: number | null;
  translation_ms: number;
}

export interface QueryError {
  category: "unsupported-type" | "syntax" | "entity";
  message: string;
  suggestions: string[];
}

export interface QueryResponse {
  id: string;
  db: string;
  nlq: string;
  trace?: Trace;
  plan_text?: string;
  operator_tree?: TreeNode;
  results?: Results;
  timing?: Timing;
  error?: QueryError;
  warnings?: string[];
  optimizer_report?: {
    selectivity: number;
    candidates: { plan: string; sampled_ms: number; predicted_ms: number; chosen: boolean }[];
  };
}

export interface DatabaseInfo {
  name: string;
  relations: string[];
  stats: { name: string; tuple_count: number }[];
}

export interface CorpusExample {
  nlq: string;
  type: string;
}
