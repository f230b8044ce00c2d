import type { SessionApi } from "./api.js";
import { renderCard } from "./cards.js";
import { DashboardView, type DashboardState } from "./dashboard.js";
import { FILTER_FIELDS, fieldValues, optionCounts } from "./filters.js";
import { JudgeFlow, VERDICT_KEYS, formatEstimate, formatTallies, type JudgeState } from "./judge.js";
import { RetryQueue, queueKey } from "./queue.js";
import type { Verdict } from "./types.js";

export interface AppOptions {
  root: HTMLElement;
  client: SessionApi;
  storage: Pick<Storage, "getItem" | "setItem" | "removeItem">;
  win: Pick<Window, "addEventListener" | "removeEventListener">;
  view: "judge" | "dashboard";
  session: string;
  annotator: string;
}

export interface AppHandles {
  judge: JudgeFlow | null;
  dashboard: DashboardView | null;
  start(): Promise<void>;
  stop(): void;
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------- judge view

function renderJudge(root: HTMLElement, state: JudgeState, flow: JudgeFlow): void {
  root.textContent = "";
  const view = el("div", "judge-view");

  const progress = el("div", "progress");
  const bar = el("div", "progress-bar");
  const percent = state.total > 0 ? (100 * state.judgedLocal) / state.total : 0;
  bar.style.width = `${percent}%`;
  progress.appendChild(bar);
  progress.appendChild(el("span", "progress-text", `${state.judgedLocal} / ${state.total} judged`));
  view.appendChild(progress);

  if (state.message) view.appendChild(el("div", "banner banner-sync", state.message));

  if (state.phase === "done" && state.summary) {
    const summary = el("div", "summary");
    summary.appendChild(el("h2", "summary-title", "Session complete"));
    summary.appendChild(el("p", "summary-n", `${state.summary.total} items, all judged`));
    summary.appendChild(el("p", "estimate", formatEstimate(state.estimate)));
    summary.appendChild(el("p", "tallies", formatTallies(state.tallies)));
    const annotators = el("ul", "annotators");
    for (const [name, stats] of Object.entries(state.summary.annotators)) {
      annotators.appendChild(
        el(
          "li",
          "annotator",
          `${name}: ${stats.judged} judged (${stats.same} same, ${stats.different} different, ${stats.unsure} unsure)`,
        ),
      );
    }
    summary.appendChild(annotators);
    view.appendChild(summary);
    root.appendChild(view);
    return;
  }

  if (state.phase === "judging" && state.current) {
    const pair = el("div", "pair");
    pair.appendChild(renderCard(state.current.source_card, "source"));
    pair.appendChild(renderCard(state.current.target_card, "target"));
    view.appendChild(pair);

    const buttons = el("div", "verdicts");
    const make = (verdict: Verdict, label: string) => {
      const button = document.createElement("button");
      button.className = `verdict verdict-${verdict}`;
      button.textContent = label;
      button.addEventListener("click", () => void flow.verdict(verdict));
      buttons.appendChild(button);
    };
    make("same", "Same (s)");
    make("different", "Different (d)");
    make("unsure", "Unsure (u)");
    view.appendChild(buttons);
  } else if (state.phase === "loading") {
    view.appendChild(el("p", "loading", "loading…"));
  } else if (state.phase === "error") {
    view.appendChild(el("div", "banner banner-error", state.message ?? "something went wrong"));
  }

  view.appendChild(el("p", "tallies", formatTallies(state.tallies)));
  view.appendChild(el("p", "estimate", formatEstimate(state.estimate)));
  root.appendChild(view);
}

// ------------------------------------------------------------ dashboard view

const AGGREGATE_COLUMNS = ["Prec.", "F-m.", "Rec.", "Size", "# tasks"] as const;

function renderDashboard(root: HTMLElement, state: DashboardState, view: DashboardView): void {
  root.textContent = "";
  const page = el("div", "dashboard-view");

  if (state.phase === "error") {
    page.appendChild(el("div", "banner banner-error", state.message ?? "failed to load dashboard"));
    root.appendChild(page);
    return;
  }
  if (state.phase === "loading") {
    page.appendChild(el("p", "loading", "loading…"));
    root.appendChild(page);
    return;
  }

  const agreement = state.payload?.agreement;
  if (agreement) {
    const text =
      agreement.kappa === null
        ? `agreement: ${agreement.reason ?? "unavailable"}`
        : `agreement: kappa ${agreement.kappa.toFixed(4)} (${agreement.band ?? "?"}, ` +
          `${agreement.n_raters} raters on ${agreement.n_items} items)`;
    page.appendChild(el("p", "agreement", text));
  }

  const aggregates = document.createElement("table");
  aggregates.className = "aggregates";
  const head = document.createElement("tr");
  for (const column of ["Matcher", "Section", ...AGGREGATE_COLUMNS]) {
    head.appendChild(el("th", "agg-head", column));
  }
  aggregates.appendChild(head);
  for (const row of view.aggregateRows()) {
    const tr = document.createElement("tr");
    tr.className = "agg-row";
    tr.appendChild(el("td", "agg-matcher", row.matcher));
    tr.appendChild(el("td", "agg-section", row.section));
    for (const column of AGGREGATE_COLUMNS) {
      const value = row.line[column];
      tr.appendChild(el("td", "agg-value", column === "# tasks" ? String(value) : value.toFixed(4)));
    }
    aggregates.appendChild(tr);
  }
  page.appendChild(aggregates);

  const cells = view.cells();
  const filters = el("div", "filters");
  for (const field of FILTER_FIELDS) {
    const select = document.createElement("select");
    select.className = `filter filter-${field}`;
    const any = document.createElement("option");
    any.value = "";
    any.textContent = `${field}: any`;
    select.appendChild(any);
    const counts = optionCounts(cells, state.filter, field);
    for (const value of fieldValues(cells, field)) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = `${value} (${counts.get(value) ?? 0})`;
      if (state.filter[field] === value) option.selected = true;
      select.appendChild(option);
    }
    select.addEventListener("change", () => view.setFilter(field, select.value || null));
    filters.appendChild(select);
  }
  const clear = document.createElement("button");
  clear.className = "filter-clear";
  clear.textContent = "clear filters";
  clear.addEventListener("click", () => view.clearFilters());
  filters.appendChild(clear);
  page.appendChild(filters);

  const visible = state.visible ?? [];
  page.appendChild(
    el("p", "row-count", `${visible.length} of ${cells.length} cells`),
  );

  const table = document.createElement("table");
  table.className = "cells";
  const columns = ["matcher", "task", "source", "target", "kind", "outcome", "trivial", "arity", "confidence"];
  const header = document.createElement("tr");
  for (const column of columns) header.appendChild(el("th", "cell-head", column));
  table.appendChild(header);
  for (const cell of visible) {
    const tr = document.createElement("tr");
    tr.className = `cell-row outcome-${cell.outcome}`;
    tr.appendChild(el("td", "cell", cell.matcher));
    tr.appendChild(el("td", "cell", cell.task));
    tr.appendChild(el("td", "cell cell-iri", cell.source));
    tr.appendChild(el("td", "cell cell-iri", cell.target));
    tr.appendChild(el("td", "cell", cell.kind));
    tr.appendChild(el("td", "cell", cell.outcome));
    tr.appendChild(el("td", "cell", cell.trivial ? "true" : "false"));
    tr.appendChild(el("td", "cell", cell.arity));
    tr.appendChild(el("td", "cell", cell.confidence === null ? "" : String(cell.confidence)));
    table.appendChild(tr);
  }
  page.appendChild(table);
  root.appendChild(page);
}

// -------------------------------------------------------------------- wiring

export function createApp(options: AppOptions): AppHandles {
  const { root, client, storage, win, view, session, annotator } = options;

  let judge: JudgeFlow | null = null;
  let dashboard: DashboardView | null = null;
  let keyHandler: ((event: KeyboardEvent) => void) | null = null;

  if (view === "judge") {
    const queue = new RetryQueue(storage, queueKey(session, annotator));
    const flow: JudgeFlow = new JudgeFlow(client, queue, session, annotator, (state) =>
      renderJudge(root, state, flow),
    );
    judge = flow;
    keyHandler = (event: KeyboardEvent) => {
      const target = event.target as HTMLElement | null;
      if (target && ["INPUT", "SELECT", "TEXTAREA"].includes(target.tagName)) return;
      const verdict = VERDICT_KEYS[event.key.toLowerCase()];
      if (verdict) {
        event.preventDefault();
        void flow.verdict(verdict);
      }
    };
    win.addEventListener("keydown", keyHandler as EventListener);
  } else {
    const board: DashboardView = new DashboardView(client, session, (state) =>
      renderDashboard(root, state, board),
    );
    dashboard = board;
  }

  return {
    judge,
    dashboard,
    async start() {
      if (judge) await judge.start();
      if (dashboard) await dashboard.load();
    },
    stop() {
      if (keyHandler) win.removeEventListener("keydown", keyHandler as EventListener);
      root.textContent = "";
    },
  };
}
