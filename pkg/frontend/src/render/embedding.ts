// Embedding view: the 2-D class layout for one layer, with zoom/pan, a
// label threshold, click-to-select, and a minimap of available layers.

import * as d3 from "d3";
import type { Action } from "../state.js";
import type { EmbeddingDoc, ViewState } from "../types.js";

export interface EmbeddingCallbacks {
  dispatch(action: Action): void;
}

const LABEL_ZOOM_THRESHOLD = 1.5;
const POINT_RADIUS = 5;

export function renderEmbedding(
  container: HTMLElement,
  embedding: EmbeddingDoc,
  layers: string[],
  state: ViewState,
  callbacks: EmbeddingCallbacks,
  width = 480,
  height = 480,
  animate = true,
): void {
  const root = d3.select(container);
  root.selectAll("*").remove();

  const minimap = root.append("div").attr("class", "layer-minimap");
  minimap
    .selectAll("button")
    .data(layers)
    .join("button")
    .attr("class", "minimap-layer")
    .classed("active", (d) => d === state.embeddingLayer)
    .text((d) => d)
    .on("click", (_, d) => callbacks.dispatch({ type: "set-embedding-layer", layer: d }));

  const svg = root
    .append("svg")
    .attr("class", "embedding-view")
    .attr("width", width)
    .attr("height", height);
  const scene = svg.append("g").attr("class", "embedding-scene");

  const xs = embedding.classes.map((c) => c.x);
  const ys = embedding.classes.map((c) => c.y);
  const pad = 0.1;
  const xScale = d3
    .scaleLinear()
    .domain(padded(d3.extent(xs) as [number, number], pad))
    .range([30, width - 30]);
  const yScale = d3
    .scaleLinear()
    .domain(padded(d3.extent(ys) as [number, number], pad))
    .range([height - 30, 30]);

  const points = scene
    .selectAll<SVGGElement, (typeof embedding.classes)[number]>("g.embedding-point")
    .data(embedding.classes, (d) => String(d.id))
    .join("g")
    .attr("class", "embedding-point")
    .classed("selected", (d) => d.id === state.selectedClass)
    .attr("data-class-id", (d) => d.id)
    .attr("transform", (d) => `translate(${xScale(d.x)},${yScale(d.y)})`)
    .on("click", (_, d) => callbacks.dispatch({ type: "select-class", id: d.id }));

  points
    .append("circle")
    .attr("r", (d) => (d.id === state.selectedClass ? POINT_RADIUS + 2 : POINT_RADIUS))
    .attr("fill", (d) => (d.id === state.selectedClass ? "#c0392b" : "#34495e"));

  const labels = points
    .append("text")
    .attr("class", "embedding-label")
    .attr("dy", -POINT_RADIUS - 3)
    .attr("text-anchor", "middle")
    .text((d) => d.name);

  const zoom = d3
    .zoom<SVGSVGElement, unknown>()
    .scaleExtent([0.5, 12])
    .on("zoom", (event: d3.D3ZoomEvent<SVGSVGElement, unknown>) => {
      scene.attr("transform", event.transform.toString());
      // Labels appear only once zoomed in far enough to read them.
      labels.style("display", event.transform.k >= LABEL_ZOOM_THRESHOLD ? "" : "none");
    });
  svg.call(zoom);
  labels.style("display", "none");

  if (animate) {
    // Brief settle animation when switching layers so the eye can follow
    // classes from one layer's layout to the next.
    points
      .attr("opacity", 0)
      .transition()
      .duration(250)
      .attr("opacity", 1);
  }
}

function padded([lo, hi]: [number, number], fraction: number): [number, number] {
  if (!isFinite(lo) || !isFinite(hi)) return [-1, 1];
  const span = hi - lo || 1;
  return [lo - span * fraction, hi + span * fraction];
}

/** Highlight the embedding points whose classes are visible in the sidebar. */
export function highlightVisible(container: HTMLElement, visible: Set<number>): void {
  d3.select(container)
    .selectAll<SVGGElement, { id: number }>("g.embedding-point")
    .classed("sidebar-visible", (d) => visible.has(d.id));
}
