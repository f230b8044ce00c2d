import type { SessionApi } from "./api.js";
import { applyFilters, emptyFilter, type FilterField, type FilterState } from "./filters.js";
import type { AggregateLine, Bundle, CellRow, Dashboard } from "./types.js";

export interface AggregateRow {
  matcher: string;
  section: string;
  line: AggregateLine;
}

export interface DashboardState {
  phase: "loading" | "ready" | "error";
  payload: Dashboard | null;
  filter: FilterState;
  /** rows surviving the active filter, null until loaded */
  visible: CellRow[] | null;
  message: string | null;
}

const AGGREGATE_SECTIONS = ["class", "property", "instance", "overall"];

function checkBundle(bundle: Bundle): void {
  if (!Array.isArray(bundle.cells)) throw new Error("bundle has no cell table");
  for (const cell of bundle.cells) {
    for (const field of ["matcher", "task", "source", "target", "kind", "outcome"] as const) {
      if (typeof cell[field] !== "string") throw new Error(`cell row missing ${field}`);
    }
  }
  if (!bundle.aggregates || typeof bundle.aggregates.matchers !== "object") {
    throw new Error("bundle has no aggregates");
  }
}

/** Dashboard controller: a verified bundle plus combinable filters.
 *
 * A malformed bundle never half-renders: validation throws before any
 * state carries cells, and the view shows the error banner instead.
 */
export class DashboardView {
  private state: DashboardState = {
    phase: "loading",
    payload: null,
    filter: emptyFilter(),
    visible: null,
    message: null,
  };

  constructor(
    private readonly client: SessionApi,
    private readonly session: string,
    private readonly onChange: (state: DashboardState) => void = () => {},
  ) {}

  snapshot(): DashboardState {
    return { ...this.state, filter: { ...this.state.filter } };
  }

  cells(): readonly CellRow[] {
    return this.state.payload?.bundle?.cells ?? [];
  }

  private emit(patch: Partial<DashboardState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async load(): Promise<void> {
    let payload: Dashboard;
    try {
      payload = await this.client.dashboard(this.session);
      if (payload.bundle) checkBundle(payload.bundle);
    } catch (error) {
      this.emit({ phase: "error", payload: null, visible: null, message: String(error) });
      return;
    }
    this.emit({
      phase: "ready",
      payload,
      visible: payload.bundle ? applyFilters(payload.bundle.cells, this.state.filter) : null,
      message: null,
    });
  }

  setFilter(field: FilterField, value: string | null): void {
    const filter = { ...this.state.filter, [field]: value };
    this.emit({ filter, visible: applyFilters(this.cells(), filter) });
  }

  clearFilters(): void {
    const filter = emptyFilter();
    this.emit({ filter, visible: applyFilters(this.cells(), filter) });
  }

  /** Flat rows for the aggregate header, one per matcher and section. */
  aggregateRows(includeEmpty = true): AggregateRow[] {
    const matchers = this.state.payload?.bundle?.aggregates.matchers ?? {};
    const rows: AggregateRow[] = [];
    for (const matcher of Object.keys(matchers).sort()) {
      const sections = matchers[matcher]?.aggregate ?? {};
      for (const section of AGGREGATE_SECTIONS) {
        const variants = sections[section];
        if (!variants) continue;
        rows.push({
          matcher,
          section,
          line: includeEmpty ? variants.all_tasks : variants.non_empty_tasks,
        });
      }
    }
    return rows;
  }
}
