import type {
  CandidateDetail,
  CandidatePage,
  CategoryLabel,
  Definition,
  ReviewDecision,
  ReviewStatus,
  StageReport,
  TrendSeries,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ListParams {
  page?: number;
  pageSize?: number;
  sortKey?: string;
  status?: string;
  stage?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listCandidates(params: ListParams = {}): Promise<CandidatePage> {
    const query = new URLSearchParams();
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("page_size", String(params.pageSize));
    if (params.sortKey) query.set("sort_key", params.sortKey);
    if (params.status) query.set("status", params.status);
    if (params.stage) query.set("stage", params.stage);
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.request<CandidatePage>(`/candidates${suffix}`);
  }

  getCandidate(id: string): Promise<CandidateDetail> {
    return this.request<CandidateDetail>(`/candidates/${encodeURIComponent(id)}`);
  }

  getTrend(id: string): Promise<TrendSeries> {
    return this.request<TrendSeries>(`/candidates/${encodeURIComponent(id)}/trend`);
  }

  setStatus(id: string, status: ReviewStatus, reviewer = "reviewer"): Promise<ReviewDecision> {
    return this.request<ReviewDecision>(`/candidates/${encodeURIComponent(id)}/status`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ status, reviewer }),
    });
  }

  requestDefinition(id: string, shots: number): Promise<Definition> {
    return this.request<Definition>(`/candidates/${encodeURIComponent(id)}/definition`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ shots }),
    });
  }

  requestCategories(
    id: string,
    setup: string,
  ): Promise<{ sentiment: CategoryLabel; domain: CategoryLabel }> {
    return this.request(`/candidates/${encodeURIComponent(id)}/categories`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ setup }),
    });
  }

  getStageReports(): Promise<StageReport[]> {
    return this.request<StageReport[]>("/reports/stages");
  }

  updateFilters(filters: Record<string, number | boolean | string[]>): Promise<{ stage_reports: StageReport[] }> {
    return this.request("/config/filters", {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ filters }),
    });
  }

  exportUrl(status?: string): string {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return `${this.baseUrl}/export.csv${query}`;
  }
}
