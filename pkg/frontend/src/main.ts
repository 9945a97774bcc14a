// Application wiring: one store, one API client, three views.  Every state
// change re-renders from data already in hand; data fetches happen only when
// the selection or layer actually changes (latest-wins in the client).

import { ApiClient } from "./api.js";
import { Store } from "./state.js";
import { renderEmbedding, highlightVisible } from "./render/embedding.js";
import { renderGraph } from "./render/graph.js";
import { renderSidebar, visibleClassIds } from "./render/sidebar.js";
import type {
  AttributionGraphDoc,
  ChannelExample,
  ClassesDoc,
  EmbeddingDoc,
  MetaDoc,
} from "./types.js";

export interface AppOptions {
  /** Disable transitions for deterministic rendering (used by tests). */
  animate?: boolean;
}

export async function startApp(
  root: HTMLElement,
  api = new ApiClient(),
  options: AppOptions = {},
): Promise<void> {
  const animate = options.animate ?? true;
  root.innerHTML = `
    <header class="app-header">
      <h1>Attribution graph explorer</h1>
    </header>
    <main class="app-main">
      <section id="sidebar" class="pane"></section>
      <section id="embedding" class="pane"></section>
      <section id="graph" class="pane"></section>
    </main>`;
  const sidebarEl = root.querySelector<HTMLElement>("#sidebar")!;
  const embeddingEl = root.querySelector<HTMLElement>("#embedding")!;
  const graphEl = root.querySelector<HTMLElement>("#graph")!;

  const meta: MetaDoc = await api.meta();
  const layers = meta.layers.map((l) => l.name);
  const store = new Store(layers[layers.length - 1]);

  let classesDoc: ClassesDoc | null = null;
  let embeddingDoc: EmbeddingDoc | null = null;
  let graphDoc: AttributionGraphDoc | null = null;
  let hoverExamples: ChannelExample[] | null = null;

  const dispatch = store.dispatch.bind(store);

  function renderAll(): void {
    const state = store.get();
    if (classesDoc !== null) {
      renderSidebar(sidebarEl, classesDoc.classes, state, { dispatch });
    }
    if (embeddingDoc !== null) {
      renderEmbedding(embeddingEl, embeddingDoc, layers, state, { dispatch }, 480, 480, animate);
      if (classesDoc !== null) {
        highlightVisible(embeddingEl, visibleClassIds(classesDoc.classes, state));
      }
    }
    if (graphDoc !== null) {
      renderGraph(graphEl, graphDoc, state, { dispatch }, hoverExamples);
    }
  }

  async function refreshData(): Promise<void> {
    const state = store.get();
    const [classes, embedding, graph] = await Promise.all([
      api.classes(state.sidebarSort, state.embeddingLayer),
      api.embedding(state.embeddingLayer),
      api.classGraph(state.selectedClass),
    ]);
    classesDoc = classes;
    embeddingDoc = embedding;
    graphDoc = graph;
    renderAll();
  }

  let previous = store.get();
  store.subscribe((state) => {
    const needsData =
      state.selectedClass !== previous.selectedClass ||
      state.embeddingLayer !== previous.embeddingLayer ||
      state.sidebarSort !== previous.sidebarSort;
    const hoverChanged = state.hover !== previous.hover;
    previous = state;
    if (needsData) {
      hoverExamples = null;
      void refreshData();
      return;
    }
    if (hoverChanged && state.hover.kind === "vertex") {
      const { layer, channel } = state.hover;
      void api.channelExamples(layer, channel).then((doc) => {
        // Only attach if the hover is still on the same vertex.
        const current = store.get().hover;
        if (current.kind === "vertex" && current.layer === layer && current.channel === channel) {
          hoverExamples = doc.examples;
          renderAll();
        }
      });
    } else if (hoverChanged) {
      hoverExamples = null;
    }
    renderAll();
  });

  await refreshData();
}

declare global {
  interface Window {
    __ATTRIGRAPH_NO_AUTOSTART?: boolean;
  }
}

if (typeof document !== "undefined" && !window.__ATTRIGRAPH_NO_AUTOSTART) {
  const mount = document.getElementById("app");
  if (mount !== null) {
    void startApp(mount);
  }
}
