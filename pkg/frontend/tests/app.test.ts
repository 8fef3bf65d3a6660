import { beforeEach, describe, expect, it } from "vitest";

import { boot } from "../src/app.js";
import { DOCUMENTED_ENDPOINTS } from "../src/api.js";
import { FIG1_NEIGHBORS, flush, makeClient } from "./helpers.js";

const STARS = {
  anglia: [{ token: "franța", score: 0.8 }],
  londra: [{ token: "franța", score: 0.5 }],
  paris: [{ token: "franța", score: 0.66 }],
  "regină": [{ token: "rege", score: 0.86 }],
};

function client() {
  return makeClient({
    similar: { "*": { anglia: FIG1_NEIGHBORS, "franța": [{ token: "paris", score: 0.9 }] } },
    stars: STARS,
    tsneTokens: ["anglia", "franța"],
    jobPolls: 1,
  });
}

describe("app shell", () => {
  beforeEach(() => {
    document.body.replaceChildren();
  });

  it("boots, lists ready models, and starts on the similar tab", async () => {
    const { api } = client();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = await boot(container, api);
    expect(app.session.selectedModelId).toBe("wordform");
    const options = [...container.querySelectorAll(".model-select option")].map((o) => o.textContent);
    expect(options.some((o) => o?.includes("lemma_lower"))).toBe(true);
    expect(app.session.activeView).toBe("similar");
    expect(app.views.similar.root.hidden).toBe(false);
    expect(app.views.graph.root.hidden).toBe(true);
  });

  it("keeps second_model_id set only while the compare view is active", async () => {
    const { api } = client();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = await boot(container, api);
    app.showView("compare");
    const right = app.views.compare.rightSelect;
    right.value = "lemma";
    right.dispatchEvent(new Event("change"));
    expect(app.session.secondModelId).toBe("lemma");
    app.showView("similar");
    expect(app.session.secondModelId).toBeNull();
  });

  it("analogy send-to-graph switches tabs and adds the four words", async () => {
    const { api, service } = client();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = await boot(container, api);
    app.showView("analogy");
    (container.querySelector<HTMLInputElement>("input[name=a]")!).value = "anglia";
    (container.querySelector<HTMLInputElement>("input[name=b]")!).value = "londra";
    (container.querySelector<HTMLInputElement>("input[name=c]")!).value = "paris";
    container.querySelector(".view-analogy form")!.dispatchEvent(new Event("submit"));
    await flush();
    container.querySelector<HTMLButtonElement>(".send-to-graph")!.dispatchEvent(new Event("click"));
    await flush();
    await flush();
    expect(app.session.activeView).toBe("graph");
    const graphCalls = service.calls.filter((c) => c.url.startsWith("/graphs"));
    expect(graphCalls.length).toBeGreaterThanOrEqual(4); // create + adds
    const tokens = [...container.querySelectorAll("circle.node")].map((c) =>
      c.getAttribute("data-token"),
    );
    for (const expected of ["anglia", "londra", "paris", "regină"]) {
      expect(tokens).toContain(expected);
    }
  });

  it("graph state survives tab switches within the session", async () => {
    const { api } = client();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = await boot(container, api);
    app.showView("graph");
    await app.views.graph.buildStar("anglia");
    expect(container.querySelectorAll("circle.node").length).toBe(2);
    app.showView("similar");
    app.showView("graph");
    expect(container.querySelectorAll("circle.node").length).toBe(2);
  });

  it("a full scripted session touches only documented endpoints", async () => {
    const { api } = client();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const app = await boot(container, api);
    await app.views.similar.query("anglia");
    app.showView("graph");
    await app.views.graph.buildStar("anglia");
    await app.views.graph.addWord("paris", 1);
    app.showView("tsne");
    await app.views.tsne.run();
    app.showView("compare");
    expect(api.traffic.length).toBeGreaterThan(5);
    for (const record of api.traffic) {
      const documented = DOCUMENTED_ENDPOINTS.some(
        ([method, pattern]) => method === record.method && pattern.test(record.path),
      );
      expect(documented, `undocumented call: ${record.method} ${record.path}`).toBe(true);
    }
  });
});
