/** Typed client for the embex HTTP service. Records every request so tests
 * can assert that only documented endpoints are ever used. */

export interface Neighbor {
  token: string;
  score: number;
}

export interface ModelMeta {
  dim: number;
  feature_kind: string;
  frequency_threshold: number;
  window: number | null;
  source: string;
}

export interface ModelEntry {
  id: string;
  path: string;
  state: "loading" | "ready" | "failed";
  meta: ModelMeta | null;
  vocab_size?: number;
  error?: string;
}

export interface AnalogyTrace {
  a: string;
  b: string;
  c: string;
  a_vec: number[];
  b_vec: number[];
  c_vec: number[];
  a_minus_b: number[];
  query: number[];
  result: Neighbor;
  residual: number[];
  cos_query_result: number;
}

export interface AnalogyResponse {
  neighbors: Neighbor[];
  trace: AnalogyTrace;
}

export interface GraphNode {
  token: string;
  is_seed: boolean;
}

export interface GraphEdge {
  a: string;
  b: string;
  weight: number;
}

export interface GraphDto {
  nodes: GraphNode[];
  edges: GraphEdge[];
  provenance: { model: string; expansions: [string, number][] };
}

export interface JobHandle {
  id: string;
  kind: string;
  state: "pending" | "running" | "done" | "failed";
  progress: { iteration?: number; kl?: number; [key: string]: unknown };
  result_ref: string | null;
  error?: string;
}

export interface TsneLayoutDto {
  tokens: string[];
  coords: [number, number][];
  config: Record<string, unknown>;
  kl_history: [number, number][];
}

export interface TsneRequest {
  tokens?: string[];
  top_frequent_n?: number;
  similar_to?: string;
  n?: number;
  config?: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: { error?: string; token?: string; message?: string },
  ) {
    super(body.message ?? body.error ?? `HTTP ${status}`);
  }
}

export interface TrafficRecord {
  method: string;
  path: string;
}

export class ApiClient {
  /** Every request issued, for the recorded-traffic test. */
  readonly traffic: TrafficRecord[] = [];
  private fetchImpl: typeof fetch;

  constructor(
    public baseUrl: string = "",
    fetchImpl?: typeof fetch,
  ) {
    this.fetchImpl = (fetchImpl ?? globalThis.fetch).bind(globalThis);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.traffic.push({ method, path });
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    let data: unknown = {};
    try {
      data = await resp.json();
    } catch {
      /* non-JSON body; keep {} */
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, data as ApiError["body"]);
    }
    return data as T;
  }

  models(): Promise<ModelEntry[]> {
    return this.request("GET", "/models");
  }

  vector(modelId: string, token: string): Promise<{ token: string; vector: number[] }> {
    const q = new URLSearchParams({ token });
    return this.request("GET", `/models/${encodeURIComponent(modelId)}/vector?${q}`);
  }

  similar(modelId: string, token: string, k: number): Promise<Neighbor[]> {
    const q = new URLSearchParams({ token, k: String(k) });
    return this.request("GET", `/models/${encodeURIComponent(modelId)}/similar?${q}`);
  }

  analogy(modelId: string, a: string, b: string, c: string, k: number): Promise<AnalogyResponse> {
    const q = new URLSearchParams({ a, b, c, k: String(k) });
    return this.request("GET", `/models/${encodeURIComponent(modelId)}/analogy?${q}`);
  }

  startTsne(modelId: string, body: TsneRequest): Promise<JobHandle> {
    return this.request("POST", `/models/${encodeURIComponent(modelId)}/tsne`, body);
  }

  job(jobId: string): Promise<JobHandle> {
    return this.request("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  jobResult<T>(jobId: string): Promise<T> {
    return this.request("GET", `/jobs/${encodeURIComponent(jobId)}/result`);
  }

  createGraph(modelId: string, center: string, n: number): Promise<{ graph_id: string; graph: GraphDto }> {
    return this.request("POST", "/graphs", { model_id: modelId, center, n });
  }

  expandGraph(graphId: string, token: string, n: number): Promise<GraphDto> {
    return this.request("POST", `/graphs/${encodeURIComponent(graphId)}/expand`, { token, n });
  }

  addToGraph(graphId: string, token: string, n: number): Promise<GraphDto> {
    return this.request("POST", `/graphs/${encodeURIComponent(graphId)}/add`, { token, n });
  }

  getGraph(graphId: string): Promise<GraphDto> {
    return this.request("GET", `/graphs/${encodeURIComponent(graphId)}`);
  }
}

/** Endpoint shapes the service documents; used by the traffic test. */
export const DOCUMENTED_ENDPOINTS: [string, RegExp][] = [
  ["GET", /^\/models$/],
  ["POST", /^\/models$/],
  ["GET", /^\/models\/[^/]+\/vector\?/],
  ["GET", /^\/models\/[^/]+\/similar\?/],
  ["GET", /^\/models\/[^/]+\/analogy\?/],
  ["POST", /^\/models\/[^/]+\/tsne$/],
  ["GET", /^\/jobs\/[^/]+$/],
  ["GET", /^\/jobs\/[^/]+\/result$/],
  ["POST", /^\/graphs$/],
  ["POST", /^\/graphs\/[^/]+\/expand$/],
  ["POST", /^\/graphs\/[^/]+\/add$/],
  ["GET", /^\/graphs\/[^/]+$/],
  ["POST", /^\/train$/],
];
