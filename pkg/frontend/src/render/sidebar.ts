// Class sidebar: one row per class with name, similarity bar, accuracy and
// a 10-bin probability histogram, plus search and sort controls.

import * as d3 from "d3";
import { filterSidebar, sortSidebar } from "../layout.js";
import type { Action } from "../state.js";
import type { ClassRow, SidebarSort, ViewState } from "../types.js";

export interface SidebarCallbacks {
  dispatch(action: Action): void;
}

const HIST_WIDTH = 80;
const HIST_HEIGHT = 24;

function histogramSvg(
  cell: d3.Selection<HTMLDivElement, ClassRow, HTMLElement | null, unknown>,
): void {
  cell.each(function (row) {
    const total = Math.max(1, d3.sum(row.histogram));
    const svg = d3
      .select(this)
      .append("svg")
      .attr("class", "histogram")
      .attr("width", HIST_WIDTH)
      .attr("height", HIST_HEIGHT);
    const barWidth = HIST_WIDTH / row.histogram.length;
    svg
      .selectAll("rect")
      .data(row.histogram)
      .join("rect")
      .attr("x", (_, i) => i * barWidth)
      .attr("width", barWidth - 1)
      .attr("height", (d) => (HIST_HEIGHT * d) / total)
      .attr("y", (d) => HIST_HEIGHT - (HIST_HEIGHT * d) / total)
      .attr("fill", "#5b8dbf");
  });
}

export function renderSidebar(
  container: HTMLElement,
  classes: ClassRow[],
  state: ViewState,
  callbacks: SidebarCallbacks,
): void {
  const root = d3.select(container);
  root.selectAll("*").remove();

  const controls = root.append("div").attr("class", "sidebar-controls");
  controls
    .append("input")
    .attr("class", "sidebar-search")
    .attr("type", "search")
    .attr("placeholder", "filter classes")
    .property("value", state.searchQuery)
    .on("input", function () {
      callbacks.dispatch({ type: "set-search", query: (this as HTMLInputElement).value });
    });

  const sortSelect = controls
    .append("select")
    .attr("class", "sidebar-sort")
    .on("change", function () {
      callbacks.dispatch({
        type: "set-sidebar-sort",
        sort: (this as HTMLSelectElement).value as SidebarSort,
      });
    });
  const options: { value: string; label: string }[] = [
    { value: `similarity:${state.selectedClass}`, label: "similarity to selection" },
    { value: "accuracy:desc", label: "accuracy (high first)" },
    { value: "accuracy:asc", label: "accuracy (low first)" },
  ];
  sortSelect
    .selectAll("option")
    .data(options)
    .join("option")
    .attr("value", (d) => d.value)
    .property("selected", (d) => d.value === state.sidebarSort)
    .text((d) => d.label);

  const visible = filterSidebar(
    sortSidebar(classes, state.sidebarSort, state.selectedClass),
    state.searchQuery,
  );

  const rows = root
    .append("div")
    .attr("class", "sidebar-rows")
    .selectAll<HTMLDivElement, ClassRow>("div.class-row")
    .data(visible, (d) => String(d.id))
    .join("div")
    .attr("class", "class-row")
    .classed("selected", (d) => d.id === state.selectedClass)
    .attr("data-class-id", (d) => d.id)
    .on("click", (_, d) => callbacks.dispatch({ type: "select-class", id: d.id }));

  rows
    .append("span")
    .attr("class", "class-name")
    .text((d) => d.name);
  rows
    .append("span")
    .attr("class", "class-accuracy")
    .text((d) => `${(d.top1_accuracy * 100).toFixed(1)}%`);

  const similarity = rows.append("div").attr("class", "similarity-bar");
  similarity
    .append("div")
    .attr("class", "similarity-fill")
    .style("width", (d) => `${Math.round(100 * Math.max(0, d.similarity ?? 0))}%`)
    .attr("data-similarity", (d) => (d.similarity === null ? "" : d.similarity.toFixed(6)));

  histogramSvg(rows.append("div").attr("class", "histogram-cell"));
}

/** Ids of the classes currently visible in the sidebar, used to highlight
 * the matching points in the embedding view. */
export function visibleClassIds(classes: ClassRow[], state: ViewState): Set<number> {
  return new Set(
    filterSidebar(sortSidebar(classes, state.sidebarSort, state.selectedClass), state.searchQuery).map(
      (c) => c.id,
    ),
  );
}
