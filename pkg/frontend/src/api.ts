// Typed client for the read-only analytics service.  Each endpoint family
// keeps at most one request in flight: starting a new request aborts the
// previous one so a slow response can never overwrite a newer one.

import type {
  AttributionGraphDoc,
  ClassesDoc,
  EmbeddingDoc,
  ExamplesDoc,
  MetaDoc,
} from "./types.js";

type FetchLike = (url: string, init?: { signal?: AbortSignal }) => Promise<Response>;

export class ApiError extends Error {
  status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;
  private controllers: Map<string, AbortController> = new Map();

  constructor(base = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  /** Fetch JSON, cancelling any in-flight request in the same channel. */
  private async get<T>(channel: string, path: string): Promise<T> {
    const previous = this.controllers.get(channel);
    if (previous !== undefined) {
      previous.abort();
    }
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    const response = await this.fetchImpl(this.base + path, { signal: controller.signal });
    if (!response.ok) {
      let message = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) message = body.error;
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(response.status, message);
    }
    return (await response.json()) as T;
  }

  meta(): Promise<MetaDoc> {
    return this.get("meta", "/api/meta");
  }

  classes(sort: string, layer?: string): Promise<ClassesDoc> {
    const params = new URLSearchParams({ sort });
    if (layer !== undefined) params.set("layer", layer);
    return this.get("classes", `/api/classes?${params.toString()}`);
  }

  classGraph(classId: number): Promise<AttributionGraphDoc> {
    return this.get("graph", `/api/class/${classId}/graph`);
  }

  embedding(layer: string): Promise<EmbeddingDoc> {
    return this.get("embedding", `/api/embedding/${encodeURIComponent(layer)}`);
  }

  channelExamples(layer: string, channel: number, k = 10): Promise<ExamplesDoc> {
    return this.get(
      "examples",
      `/api/channel/${encodeURIComponent(layer)}/${channel}/examples?k=${k}`,
    );
  }
}
