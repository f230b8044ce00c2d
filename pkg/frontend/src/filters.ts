import type { CellRow } from "./types.js";

// A filter is a conjunction over these cell fields; null means "any".
export const FILTER_FIELDS = ["matcher", "task", "kind", "outcome", "arity", "trivial"] as const;
export type FilterField = (typeof FILTER_FIELDS)[number];

export type FilterState = Record<FilterField, string | null>;

export function emptyFilter(): FilterState {
  return { matcher: null, task: null, kind: null, outcome: null, arity: null, trivial: null };
}

function cellValue(cell: CellRow, field: FilterField): string {
  if (field === "trivial") return cell.trivial ? "true" : "false";
  return cell[field];
}

function matches(cell: CellRow, filter: FilterState): boolean {
  return FILTER_FIELDS.every((field) => {
    const wanted = filter[field];
    return wanted === null || cellValue(cell, field) === wanted;
  });
}

/** Pure conjunctive filter: the input array is never touched. */
export function applyFilters(cells: readonly CellRow[], filter: FilterState): CellRow[] {
  return cells.filter((cell) => matches(cell, filter));
}

/** Distinct values a field takes over the whole table, in display order. */
export function fieldValues(cells: readonly CellRow[], field: FilterField): string[] {
  const values = new Set<string>();
  for (const cell of cells) values.add(cellValue(cell, field));
  values.delete("");
  return [...values].sort();
}

/** Live option counts for one field: how many rows each value would keep,
 * with every *other* active filter still applied. */
export function optionCounts(
  cells: readonly CellRow[],
  filter: FilterState,
  field: FilterField,
): Map<string, number> {
  const rest: FilterState = { ...filter, [field]: null };
  const counts = new Map<string, number>();
  for (const value of fieldValues(cells, field)) counts.set(value, 0);
  for (const cell of applyFilters(cells, rest)) {
    const value = cellValue(cell, field);
    if (value !== "") counts.set(value, (counts.get(value) ?? 0) + 1);
  }
  return counts;
}

export function outcomeTally(cells: readonly CellRow[]): Record<string, number> {
  const tally: Record<string, number> = { TP: 0, FP: 0, FN: 0, IGNORED: 0 };
  for (const cell of cells) tally[cell.outcome] = (tally[cell.outcome] ?? 0) + 1;
  return tally;
}
