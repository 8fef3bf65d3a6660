/** Compare view: one query against two models side by side, with the
 * neighbor tokens occurring in both vicinities highlighted. */

import { ApiClient, ApiError, Neighbor } from "../api.js";
import { el, formatScore } from "../format.js";

export class CompareView {
  readonly root: HTMLElement;
  private wordInput: HTMLInputElement;
  private kInput: HTMLInputElement;
  readonly leftSelect: HTMLSelectElement;
  readonly rightSelect: HTMLSelectElement;
  private panes: { left: HTMLElement; right: HTMLElement };
  private seq = 0;

  constructor(
    private api: ApiClient,
    private onSecondModelChange: (modelId: string | null) => void,
  ) {
    this.root = el("div", { class: "view view-compare" });
    const form = el("form", { class: "query-form" });
    this.leftSelect = el("select", { name: "left" });
    this.rightSelect = el("select", { name: "right" });
    this.wordInput = el("input", { type: "text", name: "word", placeholder: "manual" });
    this.kInput = el("input", { type: "number", name: "k", value: "10", min: "1" });
    form.append(
      el("label", {}, "Model A"), this.leftSelect,
      el("label", {}, "Model B"), this.rightSelect,
      el("label", {}, "Word"), this.wordInput,
      el("label", {}, "k"), this.kInput,
      el("button", { type: "submit" }, "Compare"),
    );
    this.panes = {
      left: el("div", { class: "pane pane-left" }),
      right: el("div", { class: "pane pane-right" }),
    };
    const split = el("div", { class: "split" });
    split.append(this.panes.left, this.panes.right);
    this.root.append(form, split);

    this.rightSelect.addEventListener("change", () => {
      this.onSecondModelChange(this.rightSelect.value || null);
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.query();
    });
  }

  setModels(ids: string[]): void {
    for (const select of [this.leftSelect, this.rightSelect]) {
      select.replaceChildren(...ids.map((id) => el("option", { value: id }, id)));
    }
    if (ids.length > 1) {
      this.rightSelect.value = ids[1];
    }
  }

  async query(): Promise<void> {
    const word = this.wordInput.value.trim();
    const left = this.leftSelect.value;
    const right = this.rightSelect.value;
    if (!word || !left || !right) return;
    this.onSecondModelChange(right);
    const k = Math.max(1, Number(this.kInput.value) || 10);
    const seq = ++this.seq;
    const [a, b] = await Promise.allSettled([
      this.api.similar(left, word, k),
      this.api.similar(right, word, k),
    ]);
    if (seq !== this.seq) return;
    const leftTokens = a.status === "fulfilled" ? new Set(a.value.map((n) => n.token)) : new Set<string>();
    const rightTokens = b.status === "fulfilled" ? new Set(b.value.map((n) => n.token)) : new Set<string>();
    const shared = new Set([...leftTokens].filter((t) => rightTokens.has(t)));
    this.renderPane(this.panes.left, left, a, shared);
    this.renderPane(this.panes.right, right, b, shared);
  }

  /** Tokens present in both neighbor lists, as currently rendered. */
  get sharedTokens(): string[] {
    return [...this.root.querySelectorAll("tr.shared td.token")].map(
      (cell) => cell.textContent ?? "",
    );
  }

  private renderPane(
    pane: HTMLElement,
    modelId: string,
    outcome: PromiseSettledResult<Neighbor[]>,
    shared: Set<string>,
  ): void {
    const title = el("h3", {}, modelId);
    if (outcome.status === "rejected") {
      const err = outcome.reason;
      const message =
        err instanceof ApiError && err.body.error === "out_of_vocabulary"
          ? `"${err.body.token}" is not in this model's vocabulary`
          : `query failed: ${err instanceof Error ? err.message : String(err)}`;
      pane.replaceChildren(title, el("div", { class: "status error", role: "alert" }, message));
      return;
    }
    const table = el("table", { class: "neighbors" });
    const body = el("tbody");
    for (const n of outcome.value) {
      const row = el("tr", { class: shared.has(n.token) ? "shared" : "" });
      row.append(
        el("td", { class: "token" }, n.token),
        el("td", { class: "score" }, formatScore(n.score)),
      );
      body.appendChild(row);
    }
    table.appendChild(body);
    pane.replaceChildren(title, table);
  }
}
