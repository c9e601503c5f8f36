import { ApiClient } from "./api.js";
import type { CandidateDetail, TrendSeries } from "./types.js";

// Detail panel: sampled contexts, daily-frequency chart, and on-demand
// definition / categorization. Service errors (e.g. too few contexts)
// are displayed verbatim.
export class DetailPanel {
  readonly element: HTMLElement;

  constructor(private readonly api: ApiClient) {
    this.element = document.createElement("div");
    this.element.className = "detail-panel";
  }

  async show(groupId: string): Promise<void> {
    const detail = await this.api.getCandidate(groupId);
    const trend = await this.api.getTrend(groupId);
    this.render(detail, trend);
  }

  private render(detail: CandidateDetail, trend: TrendSeries): void {
    this.element.replaceChildren();

    const heading = document.createElement("h2");
    heading.textContent = detail.base_form;
    this.element.appendChild(heading);

    const members = document.createElement("p");
    members.className = "members";
    members.textContent = `forms: ${detail.members.join(", ")}`;
    this.element.appendChild(members);

    this.element.appendChild(this.trendChart(trend));

    const contexts = document.createElement("ul");
    contexts.className = "contexts";
    for (const context of detail.contexts) {
      const li = document.createElement("li");
      li.textContent = context.sentence;
      li.title = `${context.doc_id} @ ${context.timestamp}`;
      contexts.appendChild(li);
    }
    this.element.appendChild(contexts);

    const definitionBox = document.createElement("div");
    definitionBox.className = "definition";
    if (detail.definition) definitionBox.textContent = detail.definition.text;
    this.element.appendChild(definitionBox);

    const categoryBox = document.createElement("div");
    categoryBox.className = "categories";
    if (detail.sentiment || detail.domain) {
      categoryBox.textContent =
        `sentiment: ${detail.sentiment?.value ?? "?"} | domain: ${detail.domain?.value ?? "?"}`;
    }
    this.element.appendChild(categoryBox);

    const error = document.createElement("div");
    error.className = "detail-error";
    this.element.appendChild(error);

    const actions = document.createElement("div");
    actions.className = "detail-actions";
    actions.appendChild(this.definitionButton(detail, definitionBox, error));
    actions.appendChild(this.categoriesButton(detail, categoryBox, error));
    this.element.appendChild(actions);
  }

  private definitionButton(
    detail: CandidateDetail,
    box: HTMLElement,
    error: HTMLElement,
  ): HTMLButtonElement {
    const button = document.createElement("button");
    button.className = "request-definition";
    button.textContent = "generate definition (5 examples)";
    button.addEventListener("click", () => {
      error.textContent = "";
      box.classList.add("loading");
      void this.api
        .requestDefinition(detail.id, 5)
        .then((definition) => {
          box.textContent = definition.text;
        })
        .catch((exc: Error) => {
          error.textContent = exc.message;
        })
        .finally(() => box.classList.remove("loading"));
    });
    return button;
  }

  private categoriesButton(
    detail: CandidateDetail,
    box: HTMLElement,
    error: HTMLElement,
  ): HTMLButtonElement {
    const button = document.createElement("button");
    button.className = "request-categories";
    button.textContent = "categorize (examples)";
    button.addEventListener("click", () => {
      error.textContent = "";
      void this.api
        .requestCategories(detail.id, "examples")
        .then((labels) => {
          box.textContent =
            `sentiment: ${labels.sentiment.value} | domain: ${labels.domain.value}`;
        })
        .catch((exc: Error) => {
          error.textContent = exc.message;
        });
    });
    return button;
  }

  private trendChart(trend: TrendSeries): SVGSVGElement {
    const width = 420;
    const height = 120;
    const pad = 18;
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("class", "trend-chart");
    svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    svg.setAttribute("width", String(width));
    svg.setAttribute("height", String(height));

    const buckets = trend.buckets;
    const maxCount = Math.max(1, ...buckets.map((b) => b.count));
    const step = buckets.length > 1 ? (width - 2 * pad) / (buckets.length - 1) : 0;

    const points: Array<[number, number]> = buckets.map((bucket, i) => [
      pad + i * step,
      height - pad - ((height - 2 * pad) * bucket.count) / maxCount,
    ]);

    if (points.length > 1) {
      const path = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
      path.setAttribute("points", points.map(([x, y]) => `${x},${y}`).join(" "));
      path.setAttribute("fill", "none");
      path.setAttribute("stroke", "#4878a8");
      svg.appendChild(path);
    }
    points.forEach(([x, y], i) => {
      const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
      dot.setAttribute("class", "trend-point");
      dot.setAttribute("cx", String(x));
      dot.setAttribute("cy", String(y));
      dot.setAttribute("r", "3");
      const bucket = buckets[i];
      const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
      title.textContent = `${bucket.date}: ${bucket.count}`;
      dot.appendChild(title);
      svg.appendChild(dot);
    });
    return svg;
  }
}
