/** Cross-view session state. Views own their tab-local state; the session
 * only carries the model selection and the active tab. */

export type ViewName = "similar" | "analogy" | "tsne" | "graph" | "compare";

export const VIEW_NAMES: ViewName[] = ["similar", "analogy", "tsne", "graph", "compare"];

export class ExplorerSession {
  selectedModelId: string | null = null;
  /** Only meaningful while the compare view is active. */
  secondModelId: string | null = null;
  activeView: ViewName = "similar";

  setActiveView(view: ViewName): void {
    this.activeView = view;
    if (view !== "compare") {
      this.secondModelId = null;
    }
  }
}
