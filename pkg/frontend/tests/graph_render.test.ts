import { beforeEach, describe, expect, it } from "vitest";

import { layerMaxima, vertexKey } from "../src/layout.js";
import { renderGraph } from "../src/render/graph.js";
import { Store } from "../src/state.js";
import { GRAPH } from "./fixtures.js";

function renderedVertexKeys(container: HTMLElement): Set<string> {
  return new Set(
    Array.from(container.querySelectorAll("circle.graph-vertex")).map(
      (el) => el.getAttribute("data-vertex")!,
    ),
  );
}

function renderedEdgeKeys(container: HTMLElement): Set<string> {
  return new Set(
    Array.from(container.querySelectorAll("line.graph-edge")).map(
      (el) => el.getAttribute("data-edge")!,
    ),
  );
}

describe("renderGraph", () => {
  let container: HTMLElement;
  let store: Store;

  beforeEach(() => {
    container = document.createElement("div");
    document.body.replaceChildren(container);
    store = new Store("mixB");
  });

  const dispatch = () => ({ dispatch: store.dispatch.bind(store) });

  it("renders exactly the fetched vertex and edge sets at threshold 0", () => {
    renderGraph(container, GRAPH, store.get(), dispatch());
    expect(renderedVertexKeys(container)).toEqual(
      new Set(GRAPH.vertices.map((v) => vertexKey(v.layer, v.channel))),
    );
    expect(renderedEdgeKeys(container)).toEqual(
      new Set(
        GRAPH.edges.map(
          (e) =>
            `${vertexKey(e.from.layer, e.from.channel)}->${vertexKey(e.to.layer, e.to.channel)}`,
        ),
      ),
    );
  });

  it("slider at 1.0 leaves exactly the per-layer activation-count maxima", () => {
    const state = store.dispatch({ type: "set-threshold", value: 1 });
    renderGraph(container, GRAPH, state, dispatch());
    const maxima = layerMaxima(GRAPH);
    const expected = new Set(
      GRAPH.vertices
        .filter((v) => v.activation_count === maxima.get(v.layer))
        .map((v) => vertexKey(v.layer, v.channel)),
    );
    expect(renderedVertexKeys(container)).toEqual(expected);
  });

  it("hovering a vertex highlights only its incident edges", () => {
    const state = store.dispatch({ type: "hover-vertex", layer: "mixB", channel: 0 });
    renderGraph(container, GRAPH, state, dispatch());
    const highlighted = Array.from(
      container.querySelectorAll("line.graph-edge.highlighted"),
    ).map((el) => el.getAttribute("data-edge"));
    expect(new Set(highlighted)).toEqual(
      new Set(["mixA/0->mixB/0", "mixA/1->mixB/0", "mixA/2->mixB/0"]),
    );
    expect(container.querySelector('circle[data-vertex="mixB/0"]')!.classList.contains("hovered")).toBe(
      true,
    );
  });

  it("shows the no-feature-visualization note", () => {
    renderGraph(container, GRAPH, store.get(), dispatch());
    expect(container.querySelector(".feature-vis-note")!.textContent).toContain(
      "no synthesized feature visualizations",
    );
  });

  it("renders hover example thumbnails text when provided", () => {
    const state = store.dispatch({ type: "hover-vertex", layer: "mixA", channel: 0 });
    renderGraph(container, GRAPH, state, dispatch(), [
      { image: 7, label: 2, value: 3.25 },
      { image: 9, label: 2, value: 2.5 },
    ]);
    const rows = Array.from(container.querySelectorAll(".hover-example")).map(
      (el) => el.textContent,
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toContain("image 7");
  });

  it("slider input dispatches a threshold update", () => {
    renderGraph(container, GRAPH, store.get(), dispatch());
    const slider = container.querySelector<HTMLInputElement>(".importance-slider")!;
    slider.value = "0.6";
    slider.dispatchEvent(new Event("input"));
    expect(store.get().importanceThreshold).toBe(0.6);
  });
});
