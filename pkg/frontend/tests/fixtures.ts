// Shared test fixtures: canned API documents shaped exactly like the
// service's responses, plus a fake fetch that serves them.

import type {
  AttributionGraphDoc,
  ClassesDoc,
  EmbeddingDoc,
  ExamplesDoc,
  MetaDoc,
} from "../src/types.js";

export const META: MetaDoc = {
  schema: 1,
  model: "toy",
  dataset: "toy",
  n_classes: 5,
  n_images: 100,
  layers: [
    { name: "mixA", channels: 12 },
    { name: "mixB", channels: 16 },
  ],
};

// Note the activation-count tie in mixA (channels 0 and 2 both at 20):
// at threshold 1.0 both must survive.
export const GRAPH: AttributionGraphDoc = {
  schema: 1,
  class_id: 2,
  layers: ["mixA", "mixB"],
  vertices: [
    { layer: "mixA", channel: 0, pagerank: 0.21, activation_count: 20 },
    { layer: "mixA", channel: 1, pagerank: 0.1, activation_count: 12 },
    { layer: "mixA", channel: 2, pagerank: 0.18, activation_count: 20 },
    { layer: "mixA", channel: 3, pagerank: 0.04, activation_count: 5 },
    { layer: "mixB", channel: 0, pagerank: 0.25, activation_count: 18 },
    { layer: "mixB", channel: 1, pagerank: 0.13, activation_count: 9 },
    { layer: "mixB", channel: 2, pagerank: 0.09, activation_count: 4 },
  ],
  edges: [
    { from: { layer: "mixA", channel: 0 }, to: { layer: "mixB", channel: 0 }, influence_count: 17 },
    { from: { layer: "mixA", channel: 0 }, to: { layer: "mixB", channel: 1 }, influence_count: 6 },
    { from: { layer: "mixA", channel: 1 }, to: { layer: "mixB", channel: 0 }, influence_count: 8 },
    { from: { layer: "mixA", channel: 2 }, to: { layer: "mixB", channel: 0 }, influence_count: 11 },
    { from: { layer: "mixA", channel: 2 }, to: { layer: "mixB", channel: 2 }, influence_count: 3 },
    { from: { layer: "mixA", channel: 3 }, to: { layer: "mixB", channel: 2 }, influence_count: 2 },
  ],
};

export function classesDoc(sort: string): ClassesDoc {
  const rows = [
    { id: 0, name: "class_0", top1_accuracy: 0.9, sim: [1.0, 0.4, 0.7, 0.2, 0.5] },
    { id: 1, name: "class_1", top1_accuracy: 0.65, sim: [0.4, 1.0, 0.3, 0.8, 0.1] },
    { id: 2, name: "class_2", top1_accuracy: 0.8, sim: [0.7, 0.3, 1.0, 0.5, 0.6] },
    { id: 3, name: "class_3", top1_accuracy: 0.95, sim: [0.2, 0.8, 0.5, 1.0, 0.3] },
    { id: 4, name: "class_4", top1_accuracy: 0.7, sim: [0.5, 0.1, 0.6, 0.3, 1.0] },
  ];
  const anchorMatch = /^similarity:(\d+)$/.exec(sort);
  const anchor = anchorMatch ? Number(anchorMatch[1]) : null;
  const classes = rows.map((r) => ({
    id: r.id,
    name: r.name,
    top1_accuracy: r.top1_accuracy,
    histogram: [0, 0, 1, 1, 2, 3, 3, 4, 3, 3],
    image_count: 20,
    similarity: anchor === null ? null : r.sim[anchor],
  }));
  if (anchor !== null) {
    classes.sort((a, b) =>
      a.id === anchor ? -1 : b.id === anchor ? 1 : (b.similarity ?? 0) - (a.similarity ?? 0),
    );
  } else if (sort === "accuracy:asc") {
    classes.sort((a, b) => a.top1_accuracy - b.top1_accuracy);
  } else {
    classes.sort((a, b) => b.top1_accuracy - a.top1_accuracy);
  }
  return { schema: 1, layer: "mixB", sort, classes };
}

export function embeddingDoc(layer: string): EmbeddingDoc {
  return {
    schema: 1,
    layer,
    method: "pca-procrustes",
    classes: [
      { id: 0, name: "class_0", x: -1.2, y: 0.4 },
      { id: 1, name: "class_1", x: 0.3, y: -0.9 },
      { id: 2, name: "class_2", x: 0.8, y: 0.7 },
      { id: 3, name: "class_3", x: -0.4, y: -0.5 },
      { id: 4, name: "class_4", x: 1.1, y: 0.1 },
    ],
  };
}

export function examplesDoc(layer: string, channel: number, k: number): ExamplesDoc {
  return {
    schema: 1,
    layer,
    channel,
    examples: Array.from({ length: k }, (_, i) => ({
      image: channel * 100 + i,
      label: i % 5,
      value: 3.5 - i * 0.25,
    })),
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Fake fetch that serves the fixture documents and records every URL. */
export function fakeFetch(log: string[] = []) {
  return async (url: string, init?: { signal?: AbortSignal }): Promise<Response> => {
    if (init?.signal?.aborted) {
      throw new DOMException("aborted", "AbortError");
    }
    log.push(url);
    let match: RegExpExecArray | null;
    if (url.endsWith("/api/meta")) return jsonResponse(META);
    if ((match = /\/api\/classes\?sort=([^&]+)/.exec(url))) {
      return jsonResponse(classesDoc(decodeURIComponent(match[1])));
    }
    if ((match = /\/api\/class\/(\d+)\/graph$/.exec(url))) {
      return jsonResponse({ ...GRAPH, class_id: Number(match[1]) });
    }
    if ((match = /\/api\/embedding\/([^/?]+)$/.exec(url))) {
      return jsonResponse(embeddingDoc(match[1]));
    }
    if ((match = /\/api\/channel\/([^/]+)\/(\d+)\/examples\?k=(\d+)/.exec(url))) {
      return jsonResponse(examplesDoc(match[1], Number(match[2]), Number(match[3])));
    }
    return jsonResponse({ error: "not found" }, 404);
  };
}
