// Attribution graph view: layers as horizontal rows (last layer on top),
// vertex glyph area scaled by activation count, edge thickness by influence
// count, hover highlighting, and the importance slider.

import * as d3 from "d3";
import {
  edgeKey,
  filterByImportance,
  incidentEdges,
  layoutGraph,
  vertexKey,
} from "../layout.js";
import type { Action } from "../state.js";
import type { AttributionGraphDoc, ChannelExample, ViewState } from "../types.js";

export interface GraphCallbacks {
  dispatch(action: Action): void;
}

export function renderGraph(
  container: HTMLElement,
  graph: AttributionGraphDoc,
  state: ViewState,
  callbacks: GraphCallbacks,
  hoverExamples: ChannelExample[] | null = null,
  width = 640,
  height = 420,
): void {
  const root = d3.select(container);
  root.selectAll("*").remove();

  const controls = root.append("div").attr("class", "graph-controls");
  controls
    .append("input")
    .attr("class", "importance-slider")
    .attr("type", "range")
    .attr("min", 0)
    .attr("max", 1)
    .attr("step", 0.01)
    .property("value", state.importanceThreshold)
    .on("input", function () {
      callbacks.dispatch({
        type: "set-threshold",
        value: Number((this as HTMLInputElement).value),
      });
    });
  controls
    .append("span")
    .attr("class", "threshold-readout")
    .text(`importance ≥ ${state.importanceThreshold.toFixed(2)} × layer max`);
  const resetButton = controls.append("button").attr("class", "zoom-reset").text("reset view");

  root
    .append("p")
    .attr("class", "feature-vis-note")
    .text(
      "Channels are shown as abstract glyphs; no synthesized feature " +
        "visualizations are rendered. Hover a vertex to list its top-activating examples.",
    );

  // Re-layout on every threshold change so the surviving vertices re-centre
  // within their rows instead of leaving gaps.
  const { vertices, edges } = filterByImportance(graph, state.importanceThreshold);
  const layout = layoutGraph(graph, vertices, edges, width, height);

  const hovered =
    state.hover.kind === "vertex" ? vertexKey(state.hover.layer, state.hover.channel) : null;
  const hoveredIncident = new Set(
    state.hover.kind === "vertex"
      ? incidentEdges(edges, state.hover.layer, state.hover.channel).map(edgeKey)
      : [],
  );
  const hoveredEdge =
    state.hover.kind === "edge"
      ? `${vertexKey(state.hover.from.layer, state.hover.from.channel)}->${vertexKey(
          state.hover.to.layer,
          state.hover.to.channel,
        )}`
      : null;

  const svg = root
    .append("svg")
    .attr("class", "graph-view")
    .attr("width", width)
    .attr("height", height);
  const scene = svg.append("g").attr("class", "graph-scene");

  scene
    .selectAll("text.layer-label")
    .data(layout.rows)
    .join("text")
    .attr("class", "layer-label")
    .attr("x", 4)
    .attr("y", (d) => d.y - 24)
    .text((d) => d.layer);

  scene
    .selectAll("line.graph-edge")
    .data(layout.edges, (d) => edgeKey(d as (typeof layout.edges)[number]))
    .join("line")
    .attr("class", "graph-edge")
    .classed("highlighted", (d) => hoveredIncident.has(edgeKey(d)) || edgeKey(d) === hoveredEdge)
    .attr("data-edge", (d) => edgeKey(d))
    .attr("data-influence-count", (d) => d.influence_count)
    .attr("x1", (d) => d.x1)
    .attr("y1", (d) => d.y1)
    .attr("x2", (d) => d.x2)
    .attr("y2", (d) => d.y2)
    .attr("stroke", "#95a5a6")
    .attr("stroke-width", (d) => d.width)
    .on("mouseenter", (_, d) =>
      callbacks.dispatch({ type: "hover-edge", from: d.from, to: d.to }),
    )
    .on("mouseleave", () => callbacks.dispatch({ type: "clear-hover" }));

  scene
    .selectAll("circle.graph-vertex")
    .data(layout.vertices, (d) =>
      vertexKey((d as (typeof layout.vertices)[number]).layer, (d as (typeof layout.vertices)[number]).channel),
    )
    .join("circle")
    .attr("class", "graph-vertex")
    .classed("hovered", (d) => vertexKey(d.layer, d.channel) === hovered)
    .attr("data-vertex", (d) => vertexKey(d.layer, d.channel))
    .attr("data-activation-count", (d) => d.activation_count)
    .attr("data-pagerank", (d) => d.pagerank)
    .attr("cx", (d) => d.x)
    .attr("cy", (d) => d.y)
    .attr("r", (d) => d.radius)
    .attr("fill", "#2980b9")
    .on("mouseenter", (_, d) =>
      callbacks.dispatch({ type: "hover-vertex", layer: d.layer, channel: d.channel }),
    )
    .on("mouseleave", () => callbacks.dispatch({ type: "clear-hover" }));

  if (state.hover.kind === "vertex" && hoverExamples !== null) {
    const panel = root.append("div").attr("class", "hover-examples");
    panel
      .append("div")
      .attr("class", "hover-title")
      .text(`top examples for ${state.hover.layer}/${state.hover.channel}`);
    panel
      .selectAll("div.hover-example")
      .data(hoverExamples)
      .join("div")
      .attr("class", "hover-example")
      .text((d) => `image ${d.image} (class ${d.label}) · ${d.value.toFixed(4)}`);
  }

  const zoom = d3
    .zoom<SVGSVGElement, unknown>()
    .scaleExtent([0.3, 8])
    .on("zoom", (event: d3.D3ZoomEvent<SVGSVGElement, unknown>) => {
      scene.attr("transform", event.transform.toString());
    });
  svg.call(zoom);
  resetButton.on("click", () =>
    svg.transition().duration(200).call(zoom.transform, d3.zoomIdentity),
  );
}
