// A tiny deterministic store: the view state is only mutated through named
// actions, so any recorded interaction sequence replays to the same state.

import type { GraphEndpoint, HoverTarget, SidebarSort, ViewState } from "./types.js";

export type Action =
  | { type: "select-class"; id: number }
  | { type: "set-embedding-layer"; layer: string }
  | { type: "set-sidebar-sort"; sort: SidebarSort }
  | { type: "set-search"; query: string }
  | { type: "set-threshold"; value: number }
  | { type: "hover-vertex"; layer: string; channel: number }
  | { type: "hover-edge"; from: GraphEndpoint; to: GraphEndpoint }
  | { type: "clear-hover" };

export function initialState(layer: string): ViewState {
  return {
    selectedClass: 0,
    embeddingLayer: layer,
    sidebarSort: "similarity:0",
    searchQuery: "",
    importanceThreshold: 0,
    hover: { kind: "none" },
  };
}

const clamp01 = (v: number): number => Math.min(1, Math.max(0, v));

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case "select-class":
      // Selecting a class also repoints the similarity sort at it, matching
      // the sidebar's "similar to the selection" reading.
      return {
        ...state,
        selectedClass: action.id,
        sidebarSort: state.sidebarSort.startsWith("similarity:")
          ? (`similarity:${action.id}` as SidebarSort)
          : state.sidebarSort,
        hover: { kind: "none" },
      };
    case "set-embedding-layer":
      return { ...state, embeddingLayer: action.layer };
    case "set-sidebar-sort":
      return { ...state, sidebarSort: action.sort };
    case "set-search":
      return { ...state, searchQuery: action.query };
    case "set-threshold":
      return { ...state, importanceThreshold: clamp01(action.value), hover: { kind: "none" } };
    case "hover-vertex":
      return { ...state, hover: { kind: "vertex", layer: action.layer, channel: action.channel } };
    case "hover-edge":
      return { ...state, hover: { kind: "edge", from: action.from, to: action.to } };
    case "clear-hover":
      return { ...state, hover: { kind: "none" } };
  }
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(layer: string) {
    this.state = initialState(layer);
  }

  get(): ViewState {
    return this.state;
  }

  dispatch(action: Action): ViewState {
    this.state = reduce(this.state, action);
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

export function hoverEquals(a: HoverTarget, b: HoverTarget): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === "vertex" && b.kind === "vertex") {
    return a.layer === b.layer && a.channel === b.channel;
  }
  if (a.kind === "edge" && b.kind === "edge") {
    return (
      a.from.layer === b.from.layer &&
      a.from.channel === b.from.channel &&
      a.to.layer === b.to.layer &&
      a.to.channel === b.to.channel
    );
  }
  return a.kind === "none";
}
