// Payload shapes of the review service API. The UI renders these as-is and
// never recomputes filter logic on the client.

export interface FilterVerdict {
  filter_id: string;
  passed: boolean;
  reason: string;
  evidence: string | null;
  undetermined: boolean;
}

export interface CandidateSummary {
  id: string;
  base_form: string;
  members: string[];
  variant_count: number;
  doc_freq: number;
  term_freq: number;
  unique_domains: number;
  first_seen: string | null;
  last_seen: string | null;
  survived: boolean;
  verdicts: FilterVerdict[];
  review_status: ReviewStatus;
  has_definition: boolean;
  sentiment: string | null;
  domain: string | null;
}

export type ReviewStatus = "pending" | "accepted" | "rejected";

export interface StageReport {
  stage_label: string;
  remaining: number;
  gold_matches: number | null;
  precision: number | null;
  recall: number | null;
  f1: number | null;
}

export interface CandidatePage {
  items: CandidateSummary[];
  total: number;
  page: number;
  page_size: number;
  stage_reports: StageReport[];
}

export interface ContextSentence {
  sentence: string;
  doc_id: string;
  timestamp: string;
}

export interface CandidateDetail {
  id: string;
  base_form: string;
  members: string[];
  review_status: ReviewStatus;
  survived: boolean;
  verdicts: FilterVerdict[];
  contexts: ContextSentence[];
  definition: Definition | null;
  sentiment: CategoryLabel | null;
  domain: CategoryLabel | null;
}

export interface Definition {
  neologism: string;
  text: string;
  shots: number;
  examples_used: string[];
  model_name: string;
  created_at: string;
}

export interface CategoryLabel {
  value: string;
  setup: string;
}

export interface TrendBucket {
  date: string;
  count: number;
}

export interface TrendSeries {
  group_id: string;
  buckets: TrendBucket[];
}

export interface ReviewDecision {
  group_id: string;
  status: ReviewStatus;
  reviewer: string;
  decided_at: string;
  version: number;
}

export interface FilterSettings {
  min_len: number;
  max_len: number;
  min_doc_freq: number;
  min_lowercase: number;
  min_non_ne: number;
  min_polish_contexts: number;
  min_norm_edit_distance: number;
  min_unique_domains: number;
}
