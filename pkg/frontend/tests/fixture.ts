// In-memory stand-in for the review service, speaking the same JSON
// wire format. State persists across component instances, so tests can
// simulate reloads. Stage counts are recomputed here, server-side-style;
// the UI only renders what it receives.

import type {
  CandidateSummary,
  ContextSentence,
  ReviewStatus,
  StageReport,
} from "../src/types.js";

interface FixtureCandidate {
  summary: CandidateSummary;
  contexts: ContextSentence[];
  definition: { text: string; shots: number } | null;
  sentiment: { value: string; setup: string } | null;
  domain: { value: string; setup: string } | null;
  trend: Array<{ date: string; count: number }>;
}

export interface FixtureOptions {
  candidateCount?: number;
  failStatusUpdates?: boolean;
}

export class FixtureService {
  readonly candidates = new Map<string, FixtureCandidate>();
  minDocFreq = 5;
  fetchCount = 0;
  definitionCalls = 0;
  failStatusUpdates: boolean;

  constructor(options: FixtureOptions = {}) {
    this.failStatusUpdates = options.failStatusUpdates ?? false;
    const count = options.candidateCount ?? 50;
    for (let i = 0; i < count; i += 1) {
      const id = `slowo${String(i).padStart(2, "0")}`;
      const docFreq = 3 + ((i * 7) % 40);
      this.candidates.set(id, {
        summary: {
          id,
          base_form: id,
          members: [id],
          variant_count: 1 + (i % 3),
          doc_freq: docFreq,
          term_freq: docFreq * 2,
          unique_domains: 1 + (i % 4),
          first_seen: "2024-05-01T06:00:00Z",
          last_seen: "2024-05-20T06:00:00Z",
          survived: true,
          verdicts: [
            { filter_id: "min_length", passed: true, reason: "", evidence: null, undetermined: false },
            { filter_id: "doc_freq", passed: true, reason: "", evidence: null, undetermined: false },
          ],
          review_status: "pending",
          has_definition: false,
          sentiment: null,
          domain: null,
        },
        contexts: Array.from({ length: 5 }, (_, j) => ({
          sentence: `Przykładowe zdanie ${j} o ${id}.`,
          doc_id: `d${j}`,
          timestamp: "2024-05-01T06:00:00Z",
        })),
        definition: null,
        sentiment: null,
        domain: null,
        trend: Array.from({ length: 4 }, (_, j) => ({
          date: `2024-05-0${j + 1}`,
          count: (i + j) % 5,
        })),
      });
    }
  }

  setContexts(id: string, sentences: string[]): void {
    const entry = this.candidates.get(id);
    if (!entry) throw new Error(`no fixture candidate ${id}`);
    entry.contexts = sentences.map((sentence, j) => ({
      sentence,
      doc_id: `d${j}`,
      timestamp: "2024-05-01T06:00:00Z",
    }));
  }

  stageReports(): StageReport[] {
    const all = this.candidates.size;
    const afterLength = all; // fixture words are all long enough
    const afterDocFreq = Array.from(this.candidates.values()).filter(
      (c) => c.summary.doc_freq >= this.minDocFreq,
    ).length;
    const row = (label: string, remaining: number): StageReport => ({
      stage_label: label,
      remaining,
      gold_matches: null,
      precision: null,
      recall: null,
      f1: null,
    });
    return [
      row("No filter", all),
      row("+ Min Token Len", afterLength),
      row(`+ Freq ≥ ${this.minDocFreq}`, afterDocFreq),
    ];
  }

  readonly fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    this.fetchCount += 1;
    const url = new URL(input, "http://fixture.local");
    const path = url.pathname;
    const method = (init?.method ?? "GET").toUpperCase();
    const body = init?.body ? JSON.parse(String(init.body)) : null;

    const json = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    const detail = (status: number, message: string) => json({ detail: message }, status);

    if (path === "/candidates" && method === "GET") {
      const sortKey = url.searchParams.get("sort_key") ?? "base_form";
      const page = Number(url.searchParams.get("page") ?? "1");
      const pageSize = Number(url.searchParams.get("page_size") ?? "50");
      const status = url.searchParams.get("status");
      let items = Array.from(this.candidates.values(), (c) => c.summary);
      if (status) items = items.filter((s) => s.review_status === status);
      items = items.slice().sort((a, b) => {
        if (sortKey === "doc_freq" || sortKey === "term_freq" || sortKey === "unique_domains") {
          const key = sortKey as "doc_freq" | "term_freq" | "unique_domains";
          return b[key] - a[key] || a.id.localeCompare(b.id);
        }
        return a.base_form.localeCompare(b.base_form) || a.id.localeCompare(b.id);
      });
      const start = (page - 1) * pageSize;
      return json({
        items: items.slice(start, start + pageSize),
        total: items.length,
        page,
        page_size: pageSize,
        stage_reports: this.stageReports(),
      });
    }

    const candidateMatch = path.match(/^\/candidates\/([^/]+)(\/(trend|status|definition|categories))?$/);
    if (candidateMatch) {
      const id = decodeURIComponent(candidateMatch[1]);
      const sub = candidateMatch[3];
      const entry = this.candidates.get(id);
      if (!entry) return detail(404, `unknown candidate group: '${id}'`);

      if (!sub && method === "GET") {
        return json({
          ...entry.summary,
          contexts: entry.contexts,
          definition: entry.definition
            ? {
                neologism: id,
                text: entry.definition.text,
                shots: entry.definition.shots,
                examples_used: entry.contexts.slice(0, entry.definition.shots).map((c) => c.sentence),
                model_name: "fixture",
                created_at: "2024-05-01T06:00:00Z",
              }
            : null,
          sentiment: entry.sentiment,
          domain: entry.domain,
        });
      }
      if (sub === "trend" && method === "GET") {
        return json({ group_id: id, buckets: entry.trend });
      }
      if (sub === "status" && method === "POST") {
        if (this.failStatusUpdates) return detail(500, "backing store unavailable");
        entry.summary.review_status = body.status as ReviewStatus;
        return json({
          group_id: id,
          status: body.status,
          reviewer: body.reviewer ?? "reviewer",
          decided_at: "2024-05-02T06:00:00Z",
          version: 2,
        });
      }
      if (sub === "definition" && method === "POST") {
        const shots = Number(body.shots ?? 5);
        if (entry.definition && entry.definition.shots === shots) {
          return json({
            neologism: id,
            text: entry.definition.text,
            shots,
            examples_used: entry.contexts.slice(0, shots).map((c) => c.sentence),
            model_name: "fixture",
            created_at: "2024-05-01T06:00:00Z",
          });
        }
        if (entry.contexts.length < shots) {
          return detail(400, `need at least ${shots} contexts, got ${entry.contexts.length}`);
        }
        this.definitionCalls += 1;
        entry.definition = { text: `Mockowa definicja słowa ${id}.`, shots };
        entry.summary.has_definition = true;
        return json({
          neologism: id,
          text: entry.definition.text,
          shots,
          examples_used: entry.contexts.slice(0, shots).map((c) => c.sentence),
          model_name: "fixture",
          created_at: "2024-05-01T06:00:00Z",
        });
      }
      if (sub === "categories" && method === "POST") {
        entry.sentiment = { value: "neutral", setup: body.setup };
        entry.domain = { value: "Technology and Science", setup: body.setup };
        entry.summary.sentiment = "neutral";
        entry.summary.domain = "Technology and Science";
        return json({ sentiment: entry.sentiment, domain: entry.domain });
      }
    }

    if (path === "/reports/stages" && method === "GET") {
      return json(this.stageReports());
    }

    if (path === "/config/filters" && method === "PUT") {
      const filters = body?.filters ?? {};
      if (filters.min_len !== undefined && filters.min_len < 1) {
        return detail(400, "invalid filter config: min_len must be >= 1");
      }
      if (filters.min_doc_freq !== undefined) {
        this.minDocFreq = Number(filters.min_doc_freq);
      }
      return json({ stage_reports: this.stageReports() });
    }

    return detail(404, `no route for ${method} ${path}`);
  };
}
