/** t-SNE view: pick a token selection, run a layout job, watch its progress,
 * then explore the labeled scatter with client-side pan and zoom. */

import { ApiClient, JobHandle, TsneLayoutDto, TsneRequest } from "../api.js";
import { el } from "../format.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 760;
const HEIGHT = 520;

export class TsneView {
  readonly root: HTMLElement;
  private modeTop: HTMLInputElement;
  private modeSimilar: HTMLInputElement;
  private nInput: HTMLInputElement;
  private wordInput: HTMLInputElement;
  private perplexity: HTMLInputElement;
  private iterations: HTMLInputElement;
  private status: HTMLElement;
  private plot: HTMLElement;
  private scale = 1;
  private tx = 0;
  private ty = 0;
  private group: SVGGElement | null = null;
  private polling = false;

  constructor(
    private api: ApiClient,
    private getModelId: () => string | null,
    private onTokenSelect: (token: string) => void,
    public pollIntervalMs = 300,
  ) {
    this.root = el("div", { class: "view view-tsne" });
    const form = el("form", { class: "query-form" });
    this.modeTop = el("input", { type: "radio", name: "mode", value: "top", checked: "" });
    this.modeSimilar = el("input", { type: "radio", name: "mode", value: "similar" });
    this.nInput = el("input", { type: "number", name: "n", value: "300", min: "4" });
    this.wordInput = el("input", { type: "text", name: "word", placeholder: "anglia" });
    this.perplexity = el("input", { type: "number", name: "perplexity", value: "30", min: "1" });
    this.iterations = el("input", { type: "number", name: "iterations", value: "1000", min: "1" });
    const start = el("button", { type: "submit" }, "Project");
    form.append(
      el("label", {}, "most frequent"), this.modeTop,
      el("label", {}, "similar to"), this.modeSimilar, this.wordInput,
      el("label", {}, "n"), this.nInput,
      el("label", {}, "perplexity"), this.perplexity,
      el("label", {}, "iterations"), this.iterations,
      start,
    );
    this.status = el("div", { class: "status", role: "status" });
    this.plot = el("div", { class: "plot" });
    this.root.append(form, this.status, this.plot);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.run();
    });
  }

  private buildRequest(): TsneRequest | null {
    const n = Math.max(4, Number(this.nInput.value) || 300);
    const config = {
      perplexity: Number(this.perplexity.value) || 30,
      n_iter: Number(this.iterations.value) || 1000,
    };
    if (this.modeSimilar.checked) {
      const word = this.wordInput.value.trim();
      if (!word) return null;
      return { similar_to: word, n, config };
    }
    return { top_frequent_n: n, config };
  }

  async run(): Promise<void> {
    const modelId = this.getModelId();
    const request = this.buildRequest();
    if (!modelId || !request || this.polling) {
      return;
    }
    this.polling = true;
    try {
      const job = await this.api.startTsne(modelId, request);
      this.status.textContent = `job ${job.id}: ${job.state}`;
      const done = await this.poll(job.id);
      if (done.state === "failed") {
        this.status.textContent = `layout failed: ${done.error ?? "unknown error"}`;
        return;
      }
      const layout = await this.api.jobResult<TsneLayoutDto>(job.id);
      this.status.textContent = `${layout.tokens.length} points, final KL ${
        layout.kl_history.length ? layout.kl_history[layout.kl_history.length - 1][1].toFixed(4) : "?"
      }`;
      this.render(layout);
    } catch (err) {
      this.status.textContent = `layout failed: ${(err as Error).message}`;
    } finally {
      this.polling = false;
    }
  }

  private async poll(jobId: string): Promise<JobHandle> {
    for (;;) {
      const job = await this.api.job(jobId);
      if (job.state === "done" || job.state === "failed") {
        return job;
      }
      if (job.progress.iteration !== undefined) {
        this.status.textContent = `iteration ${job.progress.iteration}, KL ${Number(job.progress.kl).toFixed(4)}`;
      }
      await new Promise((resolve) => setTimeout(resolve, this.pollIntervalMs));
    }
  }

  private render(layout: TsneLayoutDto): void {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(WIDTH));
    svg.setAttribute("height", String(HEIGHT));
    svg.setAttribute("class", "tsne-plot");
    const group = document.createElementNS(SVG_NS, "g");
    this.group = group;
    this.scale = 1;
    this.tx = 0;
    this.ty = 0;

    const xs = layout.coords.map((c) => c[0]);
    const ys = layout.coords.map((c) => c[1]);
    const xMin = Math.min(...xs);
    const xMax = Math.max(...xs);
    const yMin = Math.min(...ys);
    const yMax = Math.max(...ys);
    const pad = 30;
    const sx = (WIDTH - 2 * pad) / Math.max(xMax - xMin, 1e-9);
    const sy = (HEIGHT - 2 * pad) / Math.max(yMax - yMin, 1e-9);

    layout.tokens.forEach((token, i) => {
      const px = pad + (layout.coords[i][0] - xMin) * sx;
      const py = pad + (layout.coords[i][1] - yMin) * sy;
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(px));
      circle.setAttribute("cy", String(py));
      circle.setAttribute("r", "3");
      circle.setAttribute("data-token", token);
      circle.addEventListener("click", () => this.onTokenSelect(token));
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(px + 4));
      label.setAttribute("y", String(py - 4));
      label.textContent = token;
      group.append(circle, label);
    });
    svg.appendChild(group);

    // client-side wheel zoom and drag pan; no re-query involved
    svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = Math.exp(-event.deltaY * 0.002);
      this.scale *= factor;
      this.applyTransform();
    });
    let dragging: { x: number; y: number } | null = null;
    svg.addEventListener("mousedown", (event) => {
      dragging = { x: event.clientX, y: event.clientY };
    });
    svg.addEventListener("mousemove", (event) => {
      if (!dragging) return;
      this.tx += event.clientX - dragging.x;
      this.ty += event.clientY - dragging.y;
      dragging = { x: event.clientX, y: event.clientY };
      this.applyTransform();
    });
    svg.addEventListener("mouseup", () => {
      dragging = null;
    });
    this.plot.replaceChildren(svg);
    this.applyTransform();
  }

  private applyTransform(): void {
    this.group?.setAttribute(
      "transform",
      `translate(${this.tx} ${this.ty}) scale(${this.scale})`,
    );
  }
}
