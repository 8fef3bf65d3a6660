/** Shell: model selector, five tabs, and the cross-view actions that chain
 * them together (analogy -> graph, scatter point -> similar). */

import { ApiClient } from "./api.js";
import { el } from "./format.js";
import { ExplorerSession, VIEW_NAMES, ViewName } from "./state.js";
import { AnalogyView } from "./views/analogy.js";
import { CompareView } from "./views/compare.js";
import { GraphView } from "./views/graph.js";
import { SimilarView } from "./views/similar.js";
import { TsneView } from "./views/tsne.js";

export interface App {
  session: ExplorerSession;
  views: {
    similar: SimilarView;
    analogy: AnalogyView;
    tsne: TsneView;
    graph: GraphView;
    compare: CompareView;
  };
  showView(name: ViewName): void;
}

export async function boot(container: HTMLElement, api: ApiClient): Promise<App> {
  const session = new ExplorerSession();

  const header = el("header");
  const modelSelect = el("select", { class: "model-select" });
  header.append(el("span", { class: "brand" }, "embex explorer"), modelSelect);
  const tabBar = el("nav", { class: "tabs" });
  const main = el("main");
  container.replaceChildren(header, tabBar, main);

  const getModelId = () => session.selectedModelId;
  const views = {
    similar: new SimilarView(api, getModelId),
    analogy: null as unknown as AnalogyView,
    tsne: null as unknown as TsneView,
    graph: new GraphView(api, getModelId),
    compare: null as unknown as CompareView,
  };
  views.analogy = new AnalogyView(api, getModelId, (tokens) => {
    showView("graph");
    void views.graph.sendTokens(tokens);
  });
  views.tsne = new TsneView(api, getModelId, (token) => {
    showView("similar");
    void views.similar.query(token);
  });
  views.compare = new CompareView(api, (secondId) => {
    session.secondModelId = secondId;
  });

  const panels = new Map<ViewName, HTMLElement>();
  for (const name of VIEW_NAMES) {
    const tab = el("button", { type: "button", "data-view": name }, name);
    tab.addEventListener("click", () => showView(name));
    tabBar.appendChild(tab);
    const view = views[name];
    view.root.hidden = name !== session.activeView;
    panels.set(name, view.root);
    main.appendChild(view.root);
  }

  function showView(name: ViewName): void {
    session.setActiveView(name);
    for (const [viewName, panel] of panels) {
      panel.hidden = viewName !== name;
    }
    for (const tab of tabBar.querySelectorAll("button")) {
      tab.classList.toggle("active", tab.dataset.view === name);
    }
  }

  const entries = await api.models();
  const ready = entries.filter((entry) => entry.state === "ready");
  modelSelect.replaceChildren(
    ...ready.map((entry) =>
      el("option", { value: entry.id }, `${entry.id} (${entry.meta?.feature_kind ?? "?"}, dim ${entry.meta?.dim ?? "?"})`),
    ),
  );
  session.selectedModelId = ready[0]?.id ?? null;
  modelSelect.addEventListener("change", () => {
    session.selectedModelId = modelSelect.value || null;
  });
  views.compare.setModels(ready.map((entry) => entry.id));

  showView(session.activeView);
  return { session, views, showView };
}

/** Browser entry point; tests drive boot() directly instead. */
export function main(): void {
  const params = new URLSearchParams(window.location.search);
  const base =
    params.get("api") ??
    (window as unknown as { EMBEX_API_BASE?: string }).EMBEX_API_BASE ??
    "";
  const container = document.getElementById("app");
  if (container) {
    void boot(container, new ApiClient(base));
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  main();
}
