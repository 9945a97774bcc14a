// Payload types for the read-only analytics API, plus the UI's view state.

export interface MetaDoc {
  schema: number;
  model: string;
  dataset: string;
  n_classes: number;
  n_images: number;
  layers: { name: string; channels: number }[];
}

export interface ClassRow {
  id: number;
  name: string;
  top1_accuracy: number;
  histogram: number[];
  image_count: number;
  similarity: number | null;
}

export interface ClassesDoc {
  schema: number;
  layer: string;
  sort: string;
  classes: ClassRow[];
}

export interface GraphVertex {
  layer: string;
  channel: number;
  pagerank: number;
  activation_count: number;
}

export interface GraphEndpoint {
  layer: string;
  channel: number;
}

export interface GraphEdge {
  from: GraphEndpoint;
  to: GraphEndpoint;
  influence_count: number;
}

export interface AttributionGraphDoc {
  schema: number;
  class_id: number;
  layers: string[];
  vertices: GraphVertex[];
  edges: GraphEdge[];
}

export interface EmbeddingPoint {
  id: number;
  name: string;
  x: number;
  y: number;
}

export interface EmbeddingDoc {
  schema: number;
  layer: string;
  method: string;
  classes: EmbeddingPoint[];
}

export interface ChannelExample {
  image: number;
  label: number;
  value: number;
}

export interface ExamplesDoc {
  schema: number;
  layer: string;
  channel: number;
  examples: ChannelExample[];
}

export type SidebarSort = `similarity:${number}` | "accuracy:asc" | "accuracy:desc";

export type HoverTarget =
  | { kind: "none" }
  | { kind: "vertex"; layer: string; channel: number }
  | { kind: "edge"; from: GraphEndpoint; to: GraphEndpoint };

export interface ViewState {
  selectedClass: number;
  embeddingLayer: string;
  sidebarSort: SidebarSort;
  searchQuery: string;
  importanceThreshold: number; // in [0, 1]
  hover: HoverTarget;
}
