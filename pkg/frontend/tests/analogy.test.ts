import { beforeEach, describe, expect, it } from "vitest";

import { AnalogyView } from "../src/views/analogy.js";
import { flush, makeClient } from "./helpers.js";

function setup(onSend: (tokens: string[]) => void = () => {}) {
  const { api, service } = makeClient({});
  const view = new AnalogyView(api, () => "wordform", onSend);
  document.body.replaceChildren(view.root);
  return { view, service };
}

function fillAndSubmit(a: string, b: string, c: string) {
  (document.querySelector<HTMLInputElement>("input[name=a]")!).value = a;
  (document.querySelector<HTMLInputElement>("input[name=b]")!).value = b;
  (document.querySelector<HTMLInputElement>("input[name=c]")!).value = c;
  document.querySelector("form")!.dispatchEvent(new Event("submit"));
}

describe("analogy view", () => {
  beforeEach(() => {
    document.body.replaceChildren();
  });

  it("shows the worked example as placeholder text", () => {
    setup();
    expect(document.body.textContent).toContain('vec("rege") - vec("bărbat") + vec("femeie")');
    expect(document.querySelector<HTMLInputElement>("input[name=a]")!.placeholder).toBe("rege");
    expect(document.querySelector<HTMLInputElement>("input[name=b]")!.placeholder).toBe("bărbat");
    expect(document.querySelector<HTMLInputElement>("input[name=c]")!.placeholder).toBe("femeie");
  });

  it("renders the result line in A - B + C = R form", async () => {
    setup();
    fillAndSubmit("rege", "bărbat", "femeie");
    await flush();
    expect(document.querySelector(".analogy-result")!.textContent).toBe(
      "rege - bărbat + femeie = regină",
    );
  });

  it("keeps the trace hidden until toggled, then shows the vector rows", async () => {
    setup();
    fillAndSubmit("rege", "bărbat", "femeie");
    await flush();
    const panel = document.querySelector<HTMLElement>(".trace-panel")!;
    const toggle = document.querySelector<HTMLButtonElement>(".trace-toggle")!;
    expect(panel.hidden).toBe(true);
    expect(toggle.hidden).toBe(false);
    toggle.dispatchEvent(new Event("click"));
    expect(panel.hidden).toBe(false);
    expect(panel.textContent).toContain("A-B,");
    expect(panel.textContent).toContain("A-B+C,");
    expect(panel.textContent).toContain("(A-B+C)-R,");
    expect(panel.textContent).toContain("cos(A-B+C;R), 0.793000");
    toggle.dispatchEvent(new Event("click"));
    expect(panel.hidden).toBe(true);
  });

  it("sends all four words to the graph view", async () => {
    const sent: string[][] = [];
    setup((tokens) => sent.push(tokens));
    fillAndSubmit("anglia", "londra", "paris");
    await flush();
    document.querySelector<HTMLButtonElement>(".send-to-graph")!.dispatchEvent(new Event("click"));
    expect(sent).toEqual([["anglia", "londra", "paris", "regină"]]);
  });

  it("reports the offending token on OOV", async () => {
    setup();
    fillAndSubmit("rege", "necunoscut1", "femeie");
    await flush();
    const status = document.querySelector(".status")!;
    expect(status.classList.contains("error")).toBe(true);
    expect(status.textContent).toContain("necunoscut1");
    expect(document.querySelector<HTMLElement>(".trace-toggle")!.hidden).toBe(true);
  });
});
