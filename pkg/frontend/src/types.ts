// Shapes mirrored from the service JSON. Everything the UI shows comes from
// these payloads; there is no client-side graph access.

export interface Correspondence {
  source: string;
  target: string;
  relation: string;
  confidence: number;
}

export interface SampleItem {
  id: string;
  correspondence: Correspondence;
  task: string;
  matcher: string;
}

export interface EntityCard {
  iri: string;
  label: string;
  kind: string | null;
  alt_labels: string[];
  properties: [string, string][];
}

export interface NextPending {
  done: false;
  item: SampleItem;
  source_card: EntityCard | null;
  target_card: EntityCard | null;
  judged: number;
  remaining: number;
  total: number;
}

export interface NextDone {
  done: true;
  total: number;
  judged: number;
}

export type NextResponse = NextPending | NextDone;

export type Verdict = "same" | "different" | "unsure";

export interface Tallies {
  same: number;
  different: number;
  unsure: number;
  pending: number;
}

export interface EstimateEmpty {
  empty: true;
  reason: string;
}

export interface EstimateValue {
  empty: false;
  point: number;
  interval: [number, number];
  n_judged: number;
  n_unsure: number;
  confidence: number;
  max_error: number;
}

export type Estimate = EstimateEmpty | EstimateValue;

export interface JudgmentAck {
  ok: boolean;
  revised: boolean;
  tallies: Tallies;
  estimate: Estimate;
}

export interface AnnotatorStats {
  judged: number;
  same: number;
  different: number;
  unsure: number;
}

export interface SummaryItem {
  id: string;
  source: string;
  target: string;
  resolved: Verdict | null;
  judgments: Record<string, Verdict>;
}

export interface Summary {
  session: string;
  total: number;
  annotators: Record<string, AnnotatorStats>;
  tallies: Tallies;
  estimate: Estimate;
  items: SummaryItem[];
}

export interface Agreement {
  kappa: number | null;
  band?: string;
  reason?: string;
  n_items?: number;
  n_raters?: number;
}

// one row of cells.csv, as the dashboard endpoint serializes it
export interface CellRow {
  matcher: string;
  task: string;
  source: string;
  target: string;
  kind: string;
  outcome: string;
  trivial: boolean;
  arity: string;
  confidence: number | null;
}

export interface AggregateLine {
  "# tasks": number;
  Size: number;
  "Prec.": number;
  "F-m.": number;
  "Rec.": number;
}

export interface MatcherAggregates {
  tasks: Record<string, unknown>;
  aggregate: Record<string, { all_tasks: AggregateLine; non_empty_tasks: AggregateLine }>;
}

export interface Bundle {
  cells: CellRow[];
  aggregates: { matchers: Record<string, MatcherAggregates> };
  manifest: Record<string, unknown>;
}

export interface Dashboard {
  session: string;
  meta: Record<string, unknown>;
  summary: Summary;
  agreement: Agreement;
  bundle: Bundle | null;
}
