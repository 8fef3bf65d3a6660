import { beforeEach, describe, expect, it } from "vitest";

import { SimilarView } from "../src/views/similar.js";
import { FIG1_NEIGHBORS, flush, makeClient } from "./helpers.js";

function setup(similar = { "*": { anglia: FIG1_NEIGHBORS } }) {
  const { api, service } = makeClient({ similar });
  const view = new SimilarView(api, () => "wordform");
  document.body.replaceChildren(view.root);
  return { view, api, service };
}

describe("similar view", () => {
  beforeEach(() => {
    document.body.replaceChildren();
  });

  it("renders a ten-row table with 6-decimal scores for the default k", async () => {
    const { view } = setup();
    await view.query("anglia");
    const rows = [...document.querySelectorAll("table.neighbors tr")];
    expect(rows).toHaveLength(10);
    const first = rows[0].querySelectorAll("td");
    expect(first[0].textContent).toBe("franța");
    expect(first[1].textContent).toBe("0.800742");
    const scores = rows.map((r) => r.querySelectorAll("td")[1].textContent);
    expect(scores).toEqual(FIG1_NEIGHBORS.map((n) => n.score.toFixed(6)));
  });

  it("disables submit while the input is empty", () => {
    setup();
    const input = document.querySelector<HTMLInputElement>("input[name=word]")!;
    const submit = document.querySelector<HTMLButtonElement>("button[type=submit]")!;
    expect(submit.disabled).toBe(true);
    input.value = "anglia";
    input.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(false);
    input.value = "";
    input.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(true);
  });

  it("re-queries with a clicked result token", async () => {
    const neighbors = {
      "*": {
        anglia: FIG1_NEIGHBORS,
        franța: [{ token: "paris", score: 0.91 }],
      },
    };
    const { view, service } = setup(neighbors);
    await view.query("anglia");
    const link = document.querySelector<HTMLAnchorElement>('a[data-token="franța"]')!;
    link.dispatchEvent(new Event("click"));
    await flush();
    const urls = service.calls.map((c) => decodeURIComponent(c.url));
    expect(urls.some((u) => u.includes("/similar?token=franța"))).toBe(true);
    const rows = [...document.querySelectorAll("table.neighbors tr")];
    expect(rows).toHaveLength(1);
    expect(rows[0].querySelector("td.token")?.textContent).toBe("paris");
  });

  it("shows an inline error for out-of-vocabulary words", async () => {
    const { view } = setup();
    await view.query("nu-exista");
    const status = document.querySelector(".status")!;
    expect(status.classList.contains("error")).toBe(true);
    expect(status.textContent).toContain("nu-exista");
    expect(document.querySelectorAll("table.neighbors tr")).toHaveLength(0);
  });

  it("renders Romanian diacritics losslessly", async () => {
    const { view } = setup();
    await view.query("anglia");
    const tokens = [...document.querySelectorAll("td.token")].map((c) => c.textContent);
    expect(tokens).toContain("franța");
    expect(tokens).toContain("scoția");
    const status = document.querySelector(".status")!;
    expect(status.textContent).toBe('Cuvinte similare pentru "anglia":');
  });

  it("discards stale responses by sequence tag", async () => {
    let release: (() => void) | null = null;
    const slowFirst = new Promise<void>((resolve) => {
      release = resolve;
    });
    const base = makeClient({
      similar: { "*": { slow: [{ token: "OLD", score: 0.5 }], fast: [{ token: "NEW", score: 0.9 }] } },
    });
    const gatedFetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (url.includes("token=slow")) {
        await slowFirst;
      }
      return base.service.fetch(input, init);
    }) as typeof fetch;
    const { ApiClient } = await import("../src/api.js");
    const view = new SimilarView(new ApiClient("", gatedFetch), () => "m");
    document.body.replaceChildren(view.root);

    const first = view.query("slow");
    await view.query("fast");
    release!();
    await first;
    const tokens = [...document.querySelectorAll("td.token")].map((c) => c.textContent);
    expect(tokens).toEqual(["NEW"]);
  });
});
