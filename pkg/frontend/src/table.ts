import { ApiClient } from "./api.js";
import type { CandidatePage, CandidateSummary, ReviewStatus } from "./types.js";

export interface TableOptions {
  pageSize?: number;
  onSelect?: (id: string) => void;
}

// Paged, sortable candidate table with accept/reject actions. Status
// changes apply optimistically and roll back if the API call fails.
// Row order always mirrors the API response; the client never re-sorts.
export class CandidateTable {
  readonly element: HTMLElement;
  private page = 1;
  private sortKey = "base_form";
  private statusFilter = "";
  private current: CandidatePage | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly options: TableOptions = {},
  ) {
    this.element = document.createElement("div");
    this.element.className = "candidate-table";
  }

  async refresh(): Promise<void> {
    const page = await this.api.listCandidates({
      page: this.page,
      pageSize: this.options.pageSize ?? 50,
      sortKey: this.sortKey,
      status: this.statusFilter || undefined,
    });
    this.current = page;
    this.render(page);
  }

  private render(page: CandidatePage): void {
    this.element.replaceChildren();
    this.element.appendChild(this.controls(page));

    const table = document.createElement("table");
    const head = document.createElement("tr");
    for (const label of ["base form", "variants", "docs", "occurrences",
                         "domains", "stage verdicts", "status", "actions"]) {
      const th = document.createElement("th");
      th.textContent = label;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const item of page.items) {
      table.appendChild(this.row(item));
    }
    this.element.appendChild(table);

    const error = document.createElement("div");
    error.className = "table-error";
    this.element.appendChild(error);
  }

  private controls(page: CandidatePage): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "table-controls";

    const sort = document.createElement("select");
    sort.className = "sort-select";
    for (const key of ["base_form", "doc_freq", "term_freq", "unique_domains",
                       "first_seen", "last_seen"]) {
      const option = document.createElement("option");
      option.value = key;
      option.textContent = key;
      option.selected = key === this.sortKey;
      sort.appendChild(option);
    }
    sort.addEventListener("change", () => {
      this.sortKey = sort.value;
      this.page = 1;
      void this.refresh();
    });
    bar.appendChild(sort);

    const status = document.createElement("select");
    status.className = "status-select";
    for (const value of ["", "pending", "accepted", "rejected"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value || "all statuses";
      option.selected = value === this.statusFilter;
      status.appendChild(option);
    }
    status.addEventListener("change", () => {
      this.statusFilter = status.value;
      this.page = 1;
      void this.refresh();
    });
    bar.appendChild(status);

    const pager = document.createElement("span");
    pager.className = "pager";
    const pages = Math.max(1, Math.ceil(page.total / page.page_size));
    const prev = document.createElement("button");
    prev.textContent = "<";
    prev.disabled = this.page <= 1;
    prev.addEventListener("click", () => {
      this.page -= 1;
      void this.refresh();
    });
    const label = document.createElement("span");
    label.textContent = ` ${this.page} / ${pages} (${page.total}) `;
    const next = document.createElement("button");
    next.textContent = ">";
    next.disabled = this.page >= pages;
    next.addEventListener("click", () => {
      this.page += 1;
      void this.refresh();
    });
    pager.append(prev, label, next);
    bar.appendChild(pager);
    return bar;
  }

  private row(item: CandidateSummary): HTMLTableRowElement {
    const tr = document.createElement("tr");
    tr.dataset.id = item.id;

    const name = document.createElement("td");
    const link = document.createElement("a");
    link.href = `#/candidate/${encodeURIComponent(item.id)}`;
    link.textContent = item.base_form;
    link.addEventListener("click", () => this.options.onSelect?.(item.id));
    name.appendChild(link);
    tr.appendChild(name);

    for (const value of [item.variant_count, item.doc_freq, item.term_freq,
                         item.unique_domains]) {
      const td = document.createElement("td");
      td.textContent = String(value);
      tr.appendChild(td);
    }

    const verdicts = document.createElement("td");
    verdicts.className = "verdicts";
    for (const verdict of item.verdicts) {
      const badge = document.createElement("span");
      badge.className = `badge ${verdict.passed ? "pass" : "fail"}`;
      badge.title = verdict.reason || verdict.filter_id;
      badge.textContent = verdict.filter_id;
      verdicts.appendChild(badge);
    }
    tr.appendChild(verdicts);

    const status = document.createElement("td");
    status.className = `status status-${item.review_status}`;
    status.textContent = item.review_status;
    tr.appendChild(status);

    const actions = document.createElement("td");
    for (const target of ["accepted", "rejected"] as ReviewStatus[]) {
      const button = document.createElement("button");
      button.className = `action-${target}`;
      button.textContent = target === "accepted" ? "accept" : "reject";
      button.disabled = item.review_status === target;
      button.addEventListener("click", () => void this.changeStatus(item, target, status));
      actions.appendChild(button);
    }
    tr.appendChild(actions);
    return tr;
  }

  private async changeStatus(
    item: CandidateSummary,
    target: ReviewStatus,
    cell: HTMLTableCellElement,
  ): Promise<void> {
    const previous = item.review_status;
    item.review_status = target; // optimistic
    cell.textContent = target;
    cell.className = `status status-${target}`;
    try {
      await this.api.setStatus(item.id, target);
    } catch (error) {
      item.review_status = previous; // roll back
      cell.textContent = previous;
      cell.className = `status status-${previous}`;
      this.showError(`status change failed: ${(error as Error).message}`);
    }
  }

  private showError(message: string): void {
    const box = this.element.querySelector<HTMLElement>(".table-error");
    if (box) box.textContent = message;
  }

  visibleOrder(): string[] {
    return Array.from(this.element.querySelectorAll<HTMLTableRowElement>("tr[data-id]"))
      .map((tr) => tr.dataset.id ?? "");
  }

  lastResponse(): CandidatePage | null {
    return this.current;
  }
}
