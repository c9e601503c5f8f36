import { ApiClient } from "./api.js";
import type { FilterSettings, StageReport } from "./types.js";

interface FieldSpec {
  name: keyof FilterSettings;
  label: string;
  min: number;
  max?: number;
  step?: number;
}

const FIELDS: FieldSpec[] = [
  { name: "min_len", label: "min word length", min: 1 },
  { name: "max_len", label: "max word length", min: 1 },
  { name: "min_doc_freq", label: "min document frequency", min: 0 },
  { name: "min_lowercase", label: "min lowercase occurrences", min: 0 },
  { name: "min_non_ne", label: "min non-proper-noun occurrences", min: 0 },
  { name: "min_polish_contexts", label: "min Polish contexts", min: 0 },
  { name: "min_norm_edit_distance", label: "min edit distance", min: 0, max: 1, step: 0.05 },
  { name: "min_unique_domains", label: "min unique domains", min: 0 },
];

// Threshold editor with a live stage-count bar. Client-side validation
// mirrors the server invariants so obviously bad values never reach the
// API; everything else is submitted and the stage bars refreshed from
// GET /reports/stages semantics (the PUT response).
export class FilterConsole {
  readonly element: HTMLElement;
  private readonly inputs = new Map<keyof FilterSettings, HTMLInputElement>();
  private readonly fieldErrors = new Map<keyof FilterSettings, HTMLElement>();

  constructor(
    private readonly api: ApiClient,
    initial: FilterSettings,
  ) {
    this.element = document.createElement("div");
    this.element.className = "filter-console";
    this.render(initial);
  }

  private render(initial: FilterSettings): void {
    const form = document.createElement("form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    for (const field of FIELDS) {
      const row = document.createElement("label");
      row.className = "filter-field";
      const span = document.createElement("span");
      span.textContent = field.label;
      row.appendChild(span);

      const input = document.createElement("input");
      input.type = "number";
      input.name = field.name;
      input.min = String(field.min);
      if (field.max !== undefined) input.max = String(field.max);
      if (field.step !== undefined) input.step = String(field.step);
      input.value = String(initial[field.name]);
      this.inputs.set(field.name, input);
      row.appendChild(input);

      const error = document.createElement("span");
      error.className = "field-error";
      this.fieldErrors.set(field.name, error);
      row.appendChild(error);
      form.appendChild(row);
    }

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "apply filters";
    form.appendChild(submit);
    this.element.appendChild(form);

    const bars = document.createElement("div");
    bars.className = "stage-bars";
    this.element.appendChild(bars);

    const error = document.createElement("div");
    error.className = "console-error";
    this.element.appendChild(error);
  }

  values(): FilterSettings {
    const out = {} as Record<keyof FilterSettings, number>;
    for (const [name, input] of this.inputs) {
      out[name] = Number(input.value);
    }
    return out as FilterSettings;
  }

  validate(): boolean {
    for (const error of this.fieldErrors.values()) error.textContent = "";
    const values = this.values();
    let ok = true;
    const fail = (name: keyof FilterSettings, message: string) => {
      const box = this.fieldErrors.get(name);
      if (box) box.textContent = message;
      ok = false;
    };
    if (!Number.isFinite(values.min_len) || values.min_len < 1) {
      fail("min_len", "must be at least 1");
    }
    if (values.max_len < values.min_len) {
      fail("max_len", "must be >= min length");
    }
    for (const name of ["min_doc_freq", "min_lowercase", "min_non_ne",
                        "min_polish_contexts", "min_unique_domains"] as const) {
      if (!Number.isFinite(values[name]) || values[name] < 0) {
        fail(name, "must be non-negative");
      }
    }
    if (values.min_norm_edit_distance < 0 || values.min_norm_edit_distance > 1) {
      fail("min_norm_edit_distance", "must be within [0, 1]");
    }
    return ok;
  }

  async submit(): Promise<void> {
    if (!this.validate()) return;
    const errorBox = this.element.querySelector<HTMLElement>(".console-error");
    if (errorBox) errorBox.textContent = "";
    try {
      const result = await this.api.updateFilters({ ...this.values() });
      this.renderBars(result.stage_reports);
    } catch (error) {
      if (errorBox) errorBox.textContent = `update failed: ${(error as Error).message}`;
    }
  }

  async loadCurrentReports(): Promise<void> {
    this.renderBars(await this.api.getStageReports());
  }

  renderBars(reports: StageReport[]): void {
    const container = this.element.querySelector<HTMLElement>(".stage-bars");
    if (!container) return;
    container.replaceChildren();
    const max = Math.max(1, ...reports.map((r) => r.remaining));
    for (const report of reports) {
      const row = document.createElement("div");
      row.className = "stage-bar";
      row.dataset.remaining = String(report.remaining);

      const label = document.createElement("span");
      label.className = "stage-label";
      label.textContent = report.stage_label;
      row.appendChild(label);

      const bar = document.createElement("span");
      bar.className = "bar";
      bar.style.width = `${Math.max(1, Math.round((100 * report.remaining) / max))}%`;
      row.appendChild(bar);

      const count = document.createElement("span");
      count.className = "stage-count";
      count.textContent = String(report.remaining);
      row.appendChild(count);
      container.appendChild(row);
    }
  }

  barCounts(): number[] {
    return Array.from(
      this.element.querySelectorAll<HTMLElement>(".stage-bar"),
    ).map((row) => Number(row.dataset.remaining));
  }
}
