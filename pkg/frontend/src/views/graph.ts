/** Graph view: a seed word becomes the center of a star; clicking any node
 * expands it server-side, and shared neighbors merge into single nodes,
 * which is what renders indirect similarity connections. */

import { ApiClient, ApiError, GraphDto } from "../api.js";
import { el } from "../format.js";
import { forceLayout } from "../force.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 760;
const HEIGHT = 520;

export class GraphView {
  readonly root: HTMLElement;
  private seedInput: HTMLInputElement;
  private nInput: HTMLInputElement;
  private addInput: HTMLInputElement;
  private status: HTMLElement;
  private canvas: HTMLElement;
  private graphId: string | null = null;
  private graph: GraphDto | null = null;
  private positions = new Map<string, { x: number; y: number }>();

  constructor(
    private api: ApiClient,
    private getModelId: () => string | null,
  ) {
    this.root = el("div", { class: "view view-graph" });
    const form = el("form", { class: "query-form" });
    this.seedInput = el("input", { type: "text", name: "seed", placeholder: "motocicletă" });
    this.nInput = el("input", { type: "number", name: "n", value: "8", min: "1" });
    form.append(
      el("label", {}, "Center"), this.seedInput,
      el("label", {}, "n"), this.nInput,
      el("button", { type: "submit" }, "Build star"),
    );
    const addForm = el("form", { class: "query-form add-word-form" });
    this.addInput = el("input", { type: "text", name: "word", placeholder: "add word" });
    addForm.append(this.addInput, el("button", { type: "submit" }, "Add word"));
    this.status = el("div", { class: "status", role: "alert" });
    this.canvas = el("div", { class: "graph-canvas" });
    this.root.append(form, addForm, this.status, this.canvas);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.buildStar(this.seedInput.value.trim());
    });
    addForm.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.addWord(this.addInput.value.trim());
    });
  }

  async buildStar(center: string): Promise<void> {
    const modelId = this.getModelId();
    if (!modelId || !center) return;
    const n = Math.max(1, Number(this.nInput.value) || 8);
    try {
      const created = await this.api.createGraph(modelId, center, n);
      this.graphId = created.graph_id;
      this.positions.clear();
      this.update(created.graph);
    } catch (err) {
      this.report(err);
    }
  }

  async expand(token: string): Promise<void> {
    if (!this.graphId) return;
    const n = Math.max(1, Number(this.nInput.value) || 8);
    try {
      this.update(await this.api.expandGraph(this.graphId, token, n));
    } catch (err) {
      this.report(err);
    }
  }

  /** Used by the analogy view's "send to graph" action too. */
  async addWord(token: string, n = 0): Promise<void> {
    if (!token) return;
    const modelId = this.getModelId();
    if (!modelId) return;
    try {
      if (!this.graphId) {
        const created = await this.api.createGraph(modelId, token, Math.max(1, n || 1));
        this.graphId = created.graph_id;
        this.update(created.graph);
        return;
      }
      this.update(await this.api.addToGraph(this.graphId, token, n));
    } catch (err) {
      this.report(err);
    }
  }

  async sendTokens(tokens: string[], n = 3): Promise<void> {
    for (const token of tokens) {
      await this.addWord(token, n);
    }
  }

  private report(err: unknown): void {
    this.status.textContent =
      err instanceof ApiError
        ? err.body.token
          ? `"${err.body.token}" is not in this model's vocabulary`
          : `request failed: ${err.message}`
        : `request failed: ${(err as Error).message}`;
    this.status.classList.add("error");
  }

  private update(graph: GraphDto): void {
    this.graph = graph;
    this.status.textContent = `${graph.nodes.length} nodes, ${graph.edges.length} edges`;
    this.status.classList.remove("error");
    this.render();
  }

  private render(): void {
    if (!this.graph) return;
    const ids = this.graph.nodes.map((n) => n.token);
    const layout = forceLayout(
      ids,
      this.graph.edges.map((e) => ({ source: e.a, target: e.b, weight: e.weight })),
      { width: WIDTH, height: HEIGHT, initial: this.positions },
    );
    this.positions = new Map(layout.map((p) => [p.id, { x: p.x, y: p.y }]));

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(WIDTH));
    svg.setAttribute("height", String(HEIGHT));
    svg.setAttribute("class", "graph-plot");
    const flags = new Map(this.graph.nodes.map((n) => [n.token, n.is_seed]));

    for (const edge of this.graph.edges) {
      const p1 = this.positions.get(edge.a)!;
      const p2 = this.positions.get(edge.b)!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(p1.x));
      line.setAttribute("y1", String(p1.y));
      line.setAttribute("x2", String(p2.x));
      line.setAttribute("y2", String(p2.y));
      line.setAttribute("class", "edge");
      line.setAttribute("data-edge", `${edge.a}|${edge.b}`);
      svg.appendChild(line);
    }
    for (const { id, x, y } of layout) {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(x));
      circle.setAttribute("cy", String(y));
      circle.setAttribute("r", flags.get(id) ? "8" : "5");
      circle.setAttribute("class", flags.get(id) ? "node seed" : "node");
      circle.setAttribute("data-token", id);
      circle.addEventListener("click", () => void this.expand(id));
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(x + 8));
      label.setAttribute("y", String(y - 8));
      label.textContent = id;
      svg.append(circle, label);
    }
    this.canvas.replaceChildren(svg);
  }
}
