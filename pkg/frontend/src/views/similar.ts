/** Textual similar-words view: word + k in, ranked 6-decimal table out.
 * Clicking a result token feeds it back in as the next query. */

import { ApiClient, ApiError, Neighbor } from "../api.js";
import { el, formatScore } from "../format.js";

export class SimilarView {
  readonly root: HTMLElement;
  private input: HTMLInputElement;
  private kInput: HTMLInputElement;
  private submit: HTMLButtonElement;
  private status: HTMLElement;
  private results: HTMLElement;
  private seq = 0;

  constructor(
    private api: ApiClient,
    private getModelId: () => string | null,
  ) {
    this.root = el("div", { class: "view view-similar" });
    const form = el("form", { class: "query-form" });
    const label = el("label", {}, "Word");
    this.input = el("input", { type: "text", name: "word", placeholder: "anglia" });
    this.kInput = el("input", { type: "number", name: "k", value: "10", min: "1" });
    this.submit = el("button", { type: "submit" }, "Find similar");
    this.submit.disabled = true;
    label.appendChild(this.input);
    form.append(label, el("label", {}, "k"), this.kInput, this.submit);
    this.status = el("div", { class: "status", role: "alert" });
    this.results = el("div", { class: "results" });
    this.root.append(form, this.status, this.results);

    this.input.addEventListener("input", () => {
      this.submit.disabled = this.input.value.trim() === "";
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.query(this.input.value.trim());
    });
  }

  /** Issue a query programmatically (token click, cross-view navigation). */
  async query(token: string): Promise<void> {
    const modelId = this.getModelId();
    if (!modelId || !token) {
      return;
    }
    this.input.value = token;
    this.submit.disabled = false;
    const k = Math.max(1, Number(this.kInput.value) || 10);
    const seq = ++this.seq;
    this.status.textContent = "…";
    let neighbors: Neighbor[];
    try {
      neighbors = await this.api.similar(modelId, token, k);
    } catch (err) {
      if (seq !== this.seq) return; // a newer query superseded this one
      this.results.replaceChildren();
      this.status.textContent =
        err instanceof ApiError && err.body.error === "out_of_vocabulary"
          ? `"${token}" is not in this model's vocabulary`
          : `query failed: ${(err as Error).message}`;
      this.status.classList.add("error");
      return;
    }
    if (seq !== this.seq) return;
    this.status.textContent = `Cuvinte similare pentru "${token}":`;
    this.status.classList.remove("error");
    this.renderTable(neighbors);
  }

  private renderTable(neighbors: Neighbor[]): void {
    const table = el("table", { class: "neighbors" });
    const body = el("tbody");
    for (const n of neighbors) {
      const row = el("tr");
      const tokenCell = el("td", { class: "token" });
      const link = el("a", { href: "#", "data-token": n.token }, n.token);
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void this.query(n.token);
      });
      tokenCell.appendChild(link);
      row.append(tokenCell, el("td", { class: "score" }, formatScore(n.score)));
      body.appendChild(row);
    }
    table.appendChild(body);
    this.results.replaceChildren(table);
  }
}
