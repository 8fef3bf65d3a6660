import { beforeEach, describe, expect, it } from "vitest";

import { CompareView } from "../src/views/compare.js";
import { flush, makeClient } from "./helpers.js";

const WF = [
  { token: "manualul", score: 0.81 },
  { token: "manualele", score: 0.78 },
  { token: "manualitate", score: 0.64 },
];
const LM = [
  { token: "carte", score: 0.7 },
  { token: "manualitate", score: 0.66 },
  { token: "ghid", score: 0.6 },
];

function setup(similar: Record<string, Record<string, typeof WF>>) {
  const { api, service } = makeClient({ similar });
  const changes: (string | null)[] = [];
  const view = new CompareView(api, (id) => changes.push(id));
  view.setModels(["wordform", "lemma"]);
  document.body.replaceChildren(view.root);
  return { view, service, changes };
}

function submit(word: string) {
  (document.querySelector<HTMLInputElement>("input[name=word]")!).value = word;
  document.querySelector("form")!.dispatchEvent(new Event("submit"));
}

describe("compare view", () => {
  beforeEach(() => {
    document.body.replaceChildren();
  });

  it("highlights exactly the intersection of the two neighbor lists", async () => {
    const { view } = setup({ wordform: { manual: WF }, lemma: { manual: LM } });
    submit("manual");
    await flush();
    expect(view.sharedTokens).toEqual(["manualitate", "manualitate"]);
    const left = document.querySelector(".pane-left")!;
    const highlighted = [...left.querySelectorAll("tr.shared td.token")].map((c) => c.textContent);
    expect(highlighted).toEqual(["manualitate"]);
    const unhighlighted = [...left.querySelectorAll("tr:not(.shared) td.token")].map((c) => c.textContent);
    expect(unhighlighted).toEqual(["manualul", "manualele"]);
  });

  it("fully highlights when the same model is on both sides", async () => {
    const { view } = setup({ wordform: { manual: WF }, lemma: { manual: LM } });
    (document.querySelector<HTMLSelectElement>("select[name=right]")!).value = "wordform";
    submit("manual");
    await flush();
    const rows = [...document.querySelectorAll(".pane-left tr")];
    expect(rows.length).toBe(WF.length);
    expect(rows.every((r) => r.classList.contains("shared"))).toBe(true);
  });

  it("renders one pane's OOV error without blanking the other", async () => {
    const { view } = setup({ wordform: { manual: WF }, lemma: {} });
    submit("manual");
    await flush();
    const left = document.querySelector(".pane-left")!;
    const right = document.querySelector(".pane-right")!;
    expect(left.querySelectorAll("tr").length).toBe(3);
    expect(right.querySelector(".status.error")!.textContent).toContain("manual");
    expect(right.querySelectorAll("tr").length).toBe(0);
  });

  it("reports the second model selection upward", async () => {
    const { changes } = setup({ wordform: { manual: WF }, lemma: { manual: LM } });
    const right = document.querySelector<HTMLSelectElement>("select[name=right]")!;
    right.value = "lemma";
    right.dispatchEvent(new Event("change"));
    expect(changes.at(-1)).toBe("lemma");
  });
});
