/** Mock service for view tests: routes fetch calls to canned fixtures and
 * keeps enough graph state to emulate merge-on-expand semantics. */

import { ApiClient, GraphDto, Neighbor } from "../src/api.js";

export const FIG1_NEIGHBORS: Neighbor[] = [
  { token: "franța", score: 0.800742 },
  { token: "britanie", score: 0.798742 },
  { token: "scoția", score: 0.786095 },
  { token: "anglie", score: 0.749791 },
  { token: "olanda", score: 0.741721 },
  { token: "angliei", score: 0.737236 },
  { token: "irlanda", score: 0.726487 },
  { token: "britania", score: 0.712126 },
  { token: "spania", score: 0.709951 },
  { token: "italia", score: 0.707604 },
];

export interface MockOptions {
  /** token -> neighbor list, per model id (falls back to "*") */
  similar?: Record<string, Record<string, Neighbor[]>>;
  /** star neighborhoods used by graph endpoints: token -> neighbors */
  stars?: Record<string, Neighbor[]>;
  tsneCoords?: [number, number][];
  tsneTokens?: string[];
  jobPolls?: number; // "running" responses before done
}

export interface MockService {
  fetch: typeof fetch;
  calls: { method: string; url: string; body?: unknown }[];
  graphs: Map<string, GraphDto>;
}

function json(data: unknown, status = 200): Response {
  return new Response(JSON.stringify(data), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function oov(token: string): Response {
  return json({ error: "out_of_vocabulary", token }, 404);
}

export function mockService(opts: MockOptions = {}): MockService {
  const calls: MockService["calls"] = [];
  const graphs = new Map<string, GraphDto>();
  let graphSeq = 0;
  let jobSeq = 0;
  const jobPollsLeft = new Map<string, number>();
  const jobRequests = new Map<string, { tokens: string[] }>();

  function starOf(token: string, n: number): Neighbor[] | null {
    const star = opts.stars?.[token];
    return star ? star.slice(0, n) : null;
  }

  function mergeStar(graph: GraphDto, center: string, n: number): Response {
    const star = starOf(center, n);
    if (!star) return oov(center);
    const present = new Set(graph.nodes.map((node) => node.token));
    for (const nb of star) {
      if (!present.has(nb.token)) {
        graph.nodes.push({ token: nb.token, is_seed: false });
        present.add(nb.token);
      }
      const key = [center, nb.token].sort();
      if (!graph.edges.some((e) => e.a === key[0] && e.b === key[1])) {
        graph.edges.push({ a: key[0], b: key[1], weight: nb.score });
      }
    }
    graph.provenance.expansions.push([center, n]);
    return json(graph);
  }

  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, url, body });
    const path = url.replace(/^https?:\/\/[^/]+/, "");

    let m: RegExpMatchArray | null;
    if (method === "GET" && /^\/models$/.test(path)) {
      return json([
        { id: "wordform", path: "", state: "ready", meta: { dim: 300, feature_kind: "wordform", frequency_threshold: 5, window: 5, source: "" }, vocab_size: 100 },
        { id: "lemma", path: "", state: "ready", meta: { dim: 300, feature_kind: "lemma_lower", frequency_threshold: 5, window: 5, source: "" }, vocab_size: 80 },
      ]);
    }
    if ((m = path.match(/^\/models\/([^/]+)\/similar\?(.*)$/)) && method === "GET") {
      const params = new URLSearchParams(m[2]);
      const token = params.get("token") ?? "";
      const k = Number(params.get("k") ?? "10");
      const perModel = opts.similar?.[decodeURIComponent(m[1])] ?? opts.similar?.["*"];
      const neighbors = perModel?.[token];
      if (!neighbors) return oov(token);
      return json(neighbors.slice(0, k));
    }
    if ((m = path.match(/^\/models\/([^/]+)\/analogy\?(.*)$/)) && method === "GET") {
      const params = new URLSearchParams(m[2]);
      const [a, b, c] = [params.get("a")!, params.get("b")!, params.get("c")!];
      for (const token of [a, b, c]) {
        if (token.startsWith("necunoscut")) return oov(token);
      }
      const result = { token: "regină", score: 0.793 };
      const vec = [0.1, -0.2, 0.3];
      return json({
        neighbors: [result, { token: "prinţesă", score: 0.7 }],
        trace: {
          a, b, c,
          a_vec: vec, b_vec: vec, c_vec: vec,
          a_minus_b: [0, 0, 0],
          query: vec,
          result,
          residual: [0.01, 0.02, 0.03],
          cos_query_result: 0.793,
        },
      });
    }
    if ((m = path.match(/^\/models\/([^/]+)\/tsne$/)) && method === "POST") {
      const id = `job${++jobSeq}`;
      jobPollsLeft.set(id, opts.jobPolls ?? 1);
      jobRequests.set(id, { tokens: opts.tsneTokens ?? ["a", "b", "c", "d"] });
      return json({ id, kind: "tsne", state: "pending", progress: {}, result_ref: null }, 202);
    }
    if ((m = path.match(/^\/jobs\/([^/]+)$/)) && method === "GET") {
      const left = jobPollsLeft.get(m[1]);
      if (left === undefined) return json({ error: "unknown_job" }, 404);
      if (left > 0) {
        jobPollsLeft.set(m[1], left - 1);
        return json({ id: m[1], kind: "tsne", state: "running", progress: { iteration: 50, kl: 1.5 }, result_ref: null });
      }
      return json({ id: m[1], kind: "tsne", state: "done", progress: { iteration: 100, kl: 0.8 }, result_ref: `/jobs/${m[1]}/result` });
    }
    if ((m = path.match(/^\/jobs\/([^/]+)\/result$/)) && method === "GET") {
      const req = jobRequests.get(m[1]);
      if (!req) return json({ error: "unknown_job" }, 404);
      const tokens = req.tokens;
      const coords = opts.tsneCoords ?? tokens.map((_, i) => [Math.cos(i), Math.sin(i)] as [number, number]);
      return json({ tokens, coords, config: { perplexity: 30 }, kl_history: [[50, 1.5], [100, 0.8]] });
    }
    if (path === "/graphs" && method === "POST") {
      const { center, n, model_id } = body as { center: string; n: number; model_id: string };
      const star = starOf(center, n);
      if (!star) return oov(center);
      const graph: GraphDto = {
        nodes: [{ token: center, is_seed: true }],
        edges: [],
        provenance: { model: model_id, expansions: [] },
      };
      graphs.set(`g${++graphSeq}`, graph);
      mergeStar(graph, center, n);
      return json({ graph_id: `g${graphSeq}`, graph }, 201);
    }
    if ((m = path.match(/^\/graphs\/([^/]+)\/expand$/)) && method === "POST") {
      const graph = graphs.get(m[1]);
      if (!graph) return json({ error: "unknown_graph" }, 404);
      const { token, n } = body as { token: string; n: number };
      if (!graph.nodes.some((node) => node.token === token)) {
        return json({ error: "node_not_in_graph", token }, 404);
      }
      return mergeStar(graph, token, n);
    }
    if ((m = path.match(/^\/graphs\/([^/]+)\/add$/)) && method === "POST") {
      const graph = graphs.get(m[1]);
      if (!graph) return json({ error: "unknown_graph" }, 404);
      const { token, n } = body as { token: string; n: number };
      if (!opts.stars?.[token]) return oov(token);
      if (!graph.nodes.some((node) => node.token === token)) {
        graph.nodes.push({ token, is_seed: true });
      } else {
        graph.nodes.find((node) => node.token === token)!.is_seed = true;
      }
      if (n > 0) return mergeStar(graph, token, n);
      return json(graph);
    }
    if ((m = path.match(/^\/graphs\/([^/]+)$/)) && method === "GET") {
      const graph = graphs.get(m[1]);
      return graph ? json(graph) : json({ error: "unknown_graph" }, 404);
    }
    return json({ error: "not_found" }, 404);
  }) as typeof fetch;

  return { fetch: fetchImpl, calls, graphs };
}

export function makeClient(opts: MockOptions = {}): { api: ApiClient; service: MockService } {
  const service = mockService(opts);
  return { api: new ApiClient("", service.fetch), service };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
