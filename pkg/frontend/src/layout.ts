// Pure layout and filtering helpers for the attribution graph view and the
// class sidebar.  Everything here is a deterministic function of its inputs
// so the renderers (and the tests) can rely on stable output.

import type {
  AttributionGraphDoc,
  ClassRow,
  GraphEdge,
  GraphVertex,
  SidebarSort,
} from "./types.js";

export const vertexKey = (layer: string, channel: number): string => `${layer}/${channel}`;

export const edgeKey = (e: GraphEdge): string =>
  `${vertexKey(e.from.layer, e.from.channel)}->${vertexKey(e.to.layer, e.to.channel)}`;

/** Largest activation count per layer over the graph's vertices. */
export function layerMaxima(graph: AttributionGraphDoc): Map<string, number> {
  const maxima = new Map<string, number>();
  for (const v of graph.vertices) {
    const current = maxima.get(v.layer) ?? 0;
    if (v.activation_count > current) maxima.set(v.layer, v.activation_count);
  }
  return maxima;
}

/**
 * Importance filter driven by the slider.  A vertex survives when its
 * activation count is at least `threshold` times the maximum activation
 * count in its own layer; edges survive when both endpoints do.  At
 * threshold 1.0 only the per-layer maxima (including ties) remain, and at
 * 0 the graph is untouched.
 */
export function filterByImportance(
  graph: AttributionGraphDoc,
  threshold: number,
): { vertices: GraphVertex[]; edges: GraphEdge[] } {
  const maxima = layerMaxima(graph);
  const vertices = graph.vertices.filter(
    (v) => v.activation_count >= threshold * (maxima.get(v.layer) ?? 0),
  );
  const kept = new Set(vertices.map((v) => vertexKey(v.layer, v.channel)));
  const edges = graph.edges.filter(
    (e) => kept.has(vertexKey(e.from.layer, e.from.channel)) && kept.has(vertexKey(e.to.layer, e.to.channel)),
  );
  return { vertices, edges };
}

export interface PlacedVertex extends GraphVertex {
  x: number;
  y: number;
  radius: number;
}

export interface PlacedEdge extends GraphEdge {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
}

export interface GraphLayout {
  vertices: PlacedVertex[];
  edges: PlacedEdge[];
  rows: { layer: string; y: number }[];
}

const MIN_RADIUS = 4;
const MAX_RADIUS = 22;
const MIN_EDGE_WIDTH = 1;
const MAX_EDGE_WIDTH = 8;

/**
 * Place the (already filtered) vertices on horizontal rows, one per layer,
 * with the last layer on top.  Within a row vertices are re-centred and
 * ordered by channel so the layout does not jump when the filter changes.
 * Glyph area scales with activation count; edge thickness with influence
 * count.
 */
export function layoutGraph(
  graph: AttributionGraphDoc,
  vertices: GraphVertex[],
  edges: GraphEdge[],
  width: number,
  height: number,
): GraphLayout {
  const nLayers = graph.layers.length;
  const rowY = new Map<string, number>();
  const rows: { layer: string; y: number }[] = [];
  graph.layers.forEach((layer, index) => {
    // index 0 is the earliest layer; it goes at the bottom of the canvas.
    const y = nLayers === 1 ? height / 2 : (height * (nLayers - 1 - index + 0.5)) / nLayers;
    rowY.set(layer, y);
    rows.push({ layer, y });
  });

  const maxCount = Math.max(1, ...vertices.map((v) => v.activation_count));
  const byLayer = new Map<string, GraphVertex[]>();
  for (const v of vertices) {
    const bucket = byLayer.get(v.layer);
    if (bucket === undefined) byLayer.set(v.layer, [v]);
    else bucket.push(v);
  }

  const placed: PlacedVertex[] = [];
  const position = new Map<string, { x: number; y: number }>();
  for (const [layer, bucket] of byLayer) {
    const ordered = [...bucket].sort((a, b) => a.channel - b.channel);
    const y = rowY.get(layer) ?? height / 2;
    ordered.forEach((v, index) => {
      const x = (width * (index + 1)) / (ordered.length + 1);
      // Area proportional to count -> radius proportional to sqrt(count).
      const radius =
        MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * Math.sqrt(v.activation_count / maxCount);
      placed.push({ ...v, x, y, radius });
      position.set(vertexKey(layer, v.channel), { x, y });
    });
  }

  const maxInfluence = Math.max(1, ...edges.map((e) => e.influence_count));
  const placedEdges: PlacedEdge[] = edges.map((e) => {
    const a = position.get(vertexKey(e.from.layer, e.from.channel));
    const b = position.get(vertexKey(e.to.layer, e.to.channel));
    const widthPx =
      MIN_EDGE_WIDTH + (MAX_EDGE_WIDTH - MIN_EDGE_WIDTH) * (e.influence_count / maxInfluence);
    return {
      ...e,
      x1: a?.x ?? 0,
      y1: a?.y ?? 0,
      x2: b?.x ?? 0,
      y2: b?.y ?? 0,
      width: widthPx,
    };
  });

  return { vertices: placed, edges: placedEdges, rows };
}

/** Edges touching the given vertex. */
export function incidentEdges(edges: GraphEdge[], layer: string, channel: number): GraphEdge[] {
  return edges.filter(
    (e) =>
      (e.from.layer === layer && e.from.channel === channel) ||
      (e.to.layer === layer && e.to.channel === channel),
  );
}

/**
 * Order sidebar rows.  The selected class is pinned to the top; the rest
 * follow the requested sort with class id as the deterministic tie-break.
 */
export function sortSidebar(
  classes: ClassRow[],
  sort: SidebarSort,
  selectedClass: number,
): ClassRow[] {
  const selected = classes.filter((c) => c.id === selectedClass);
  const rest = classes.filter((c) => c.id !== selectedClass);
  let compare: (a: ClassRow, b: ClassRow) => number;
  if (sort === "accuracy:asc") {
    compare = (a, b) => a.top1_accuracy - b.top1_accuracy || a.id - b.id;
  } else if (sort === "accuracy:desc") {
    compare = (a, b) => b.top1_accuracy - a.top1_accuracy || a.id - b.id;
  } else {
    compare = (a, b) => (b.similarity ?? -Infinity) - (a.similarity ?? -Infinity) || a.id - b.id;
  }
  return [...selected, ...rest.sort(compare)];
}

/** Case-insensitive substring match on class name or numeric id. */
export function filterSidebar(classes: ClassRow[], query: string): ClassRow[] {
  const needle = query.trim().toLowerCase();
  if (needle === "") return classes;
  return classes.filter(
    (c) => c.name.toLowerCase().includes(needle) || String(c.id).includes(needle),
  );
}
