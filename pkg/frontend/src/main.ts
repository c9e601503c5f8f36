import { ApiClient } from "./api.js";
import { CandidateTable } from "./table.js";
import { DetailPanel } from "./detail.js";
import { FilterConsole } from "./filters.js";
import type { FilterSettings } from "./types.js";

const DEFAULT_FILTERS: FilterSettings = {
  min_len: 3,
  max_len: 20,
  min_doc_freq: 5,
  min_lowercase: 5,
  min_non_ne: 5,
  min_polish_contexts: 5,
  min_norm_edit_distance: 0.5,
  min_unique_domains: 1,
};

export function mountApp(root: HTMLElement, api = new ApiClient("/")): void {
  const layout = document.createElement("div");
  layout.className = "layout";

  const detail = new DetailPanel(api);
  const table = new CandidateTable(api, {
    onSelect: (id) => void detail.show(id),
  });
  const console_ = new FilterConsole(api, DEFAULT_FILTERS);

  const left = document.createElement("div");
  left.className = "left";
  left.appendChild(table.element);
  left.appendChild(console_.element);

  const right = document.createElement("div");
  right.className = "right";
  right.appendChild(detail.element);

  layout.append(left, right);
  root.appendChild(layout);

  void table.refresh();
  void console_.loadCurrentReports();
}

declare global {
  interface Window {
    neologMount?: typeof mountApp;
  }
}

if (typeof window !== "undefined") {
  window.neologMount = mountApp;
  const root = document.getElementById("app");
  if (root) mountApp(root);
}
