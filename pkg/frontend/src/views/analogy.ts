/** Analogy view: A − B + C in, result line out, with an expandable panel
 * showing the intermediate vectors exactly as the textual trace lists them. */

import { AnalogyResponse, ApiClient, ApiError } from "../api.js";
import { el, formatScore, formatVector } from "../format.js";

export class AnalogyView {
  readonly root: HTMLElement;
  private inputs: { a: HTMLInputElement; b: HTMLInputElement; c: HTMLInputElement };
  private status: HTMLElement;
  private resultLine: HTMLElement;
  private traceToggle: HTMLButtonElement;
  private tracePanel: HTMLElement;
  private sendButton: HTMLButtonElement;
  private last: AnalogyResponse | null = null;
  private seq = 0;

  constructor(
    private api: ApiClient,
    private getModelId: () => string | null,
    private onSendToGraph: (tokens: string[]) => void,
  ) {
    this.root = el("div", { class: "view view-analogy" });
    const intro = el(
      "p",
      { class: "hint" },
      'Exemplu: vec("rege") - vec("bărbat") + vec("femeie") = vec("regină")',
    );
    const form = el("form", { class: "query-form" });
    this.inputs = {
      a: el("input", { type: "text", name: "a", placeholder: "rege" }),
      b: el("input", { type: "text", name: "b", placeholder: "bărbat" }),
      c: el("input", { type: "text", name: "c", placeholder: "femeie" }),
    };
    form.append(
      el("label", {}, "A"), this.inputs.a,
      el("label", {}, "B"), this.inputs.b,
      el("label", {}, "C"), this.inputs.c,
      el("button", { type: "submit" }, "Solve"),
    );
    this.status = el("div", { class: "status", role: "alert" });
    this.resultLine = el("div", { class: "analogy-result" });
    this.traceToggle = el("button", { type: "button", class: "trace-toggle" }, "Afisare vectori");
    this.traceToggle.hidden = true;
    this.tracePanel = el("pre", { class: "trace-panel" });
    this.tracePanel.hidden = true;
    this.sendButton = el("button", { type: "button", class: "send-to-graph" }, "Send to graph");
    this.sendButton.hidden = true;

    this.root.append(intro, form, this.status, this.resultLine, this.traceToggle, this.tracePanel, this.sendButton);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.query();
    });
    this.traceToggle.addEventListener("click", () => {
      this.tracePanel.hidden = !this.tracePanel.hidden;
    });
    this.sendButton.addEventListener("click", () => {
      if (this.last) {
        const t = this.last.trace;
        this.onSendToGraph([t.a, t.b, t.c, t.result.token]);
      }
    });
  }

  private async query(): Promise<void> {
    const modelId = this.getModelId();
    const a = this.inputs.a.value.trim();
    const b = this.inputs.b.value.trim();
    const c = this.inputs.c.value.trim();
    if (!modelId || !a || !b || !c) {
      return;
    }
    const seq = ++this.seq;
    this.status.textContent = "…";
    let response: AnalogyResponse;
    try {
      response = await this.api.analogy(modelId, a, b, c, 10);
    } catch (err) {
      if (seq !== this.seq) return;
      this.resultLine.textContent = "";
      this.traceToggle.hidden = true;
      this.sendButton.hidden = true;
      this.status.textContent =
        err instanceof ApiError && err.body.token
          ? `"${err.body.token}" is not in this model's vocabulary`
          : `query failed: ${(err as Error).message}`;
      this.status.classList.add("error");
      return;
    }
    if (seq !== this.seq) return;
    this.last = response;
    this.status.textContent = "";
    this.status.classList.remove("error");
    const t = response.trace;
    this.resultLine.textContent = `${t.a} - ${t.b} + ${t.c} = ${t.result.token}`;
    this.tracePanel.hidden = true; // collapsed until asked for
    this.tracePanel.textContent = [
      `${t.a}, ${formatVector(t.a_vec)}`,
      `${t.b}, ${formatVector(t.b_vec)}`,
      `${t.c}, ${formatVector(t.c_vec)}`,
      `${t.result.token}, ${formatVector(t.residual.map((r, i) => t.query[i] - r))}`,
      ``,
      `A-B, ${formatVector(t.a_minus_b)}`,
      `A-B+C, ${formatVector(t.query)}`,
      `(A-B+C)-R, ${formatVector(t.residual)}`,
      `cos(A-B+C;R), ${formatScore(t.cos_query_result)}`,
    ].join("\n");
    this.traceToggle.hidden = false;
    this.sendButton.hidden = false;
  }
}
