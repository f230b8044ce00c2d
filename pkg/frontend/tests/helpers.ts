import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { CellRow } from "../src/types.js";

export const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
export const MINI_DIR = join(REPO_ROOT, "tests", "data", "mini");
export const REFERENCE_CELLS = join(MINI_DIR, "reference", "cells.csv");

/** Minimal in-memory Storage for queue tests. */
export function fakeStorage(): Pick<Storage, "getItem" | "setItem" | "removeItem"> & {
  data: Map<string, string>;
} {
  const data = new Map<string, string>();
  return {
    data,
    getItem: (key) => data.get(key) ?? null,
    setItem: (key, value) => void data.set(key, value),
    removeItem: (key) => void data.delete(key),
  };
}

/** Parse a cells.csv the dumb way: the bundled fixtures never contain commas
 * or quotes inside values, so a plain split is an honest second opinion. */
export function readCellsCsv(path: string): CellRow[] {
  const lines = readFileSync(path, "utf-8").trim().split("\n");
  const header = lines[0];
  if (header !== "matcher,task,source,target,kind,outcome,trivial,arity,confidence") {
    throw new Error(`unexpected header: ${header}`);
  }
  return lines.slice(1).map((line) => {
    const parts = line.split(",");
    if (parts.length !== 9) throw new Error(`bad row: ${line}`);
    return {
      matcher: parts[0]!,
      task: parts[1]!,
      source: parts[2]!,
      target: parts[3]!,
      kind: parts[4]!,
      outcome: parts[5]!,
      trivial: parts[6] === "true",
      arity: parts[7]!,
      confidence: parts[8] === "" ? null : Number(parts[8]),
    };
  });
}

/** Nested-loop count sharing nothing with src/filters.ts. */
export function countByHand(
  cells: CellRow[],
  wanted: Partial<Record<"matcher" | "task" | "kind" | "outcome" | "arity" | "trivial", string>>,
): number {
  let n = 0;
  for (const cell of cells) {
    let keep = true;
    if (wanted.matcher !== undefined && cell.matcher !== wanted.matcher) keep = false;
    if (wanted.task !== undefined && cell.task !== wanted.task) keep = false;
    if (wanted.kind !== undefined && cell.kind !== wanted.kind) keep = false;
    if (wanted.outcome !== undefined && cell.outcome !== wanted.outcome) keep = false;
    if (wanted.arity !== undefined && cell.arity !== wanted.arity) keep = false;
    if (wanted.trivial !== undefined && String(cell.trivial) !== wanted.trivial) keep = false;
    if (keep) n += 1;
  }
  return n;
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function until(
  condition: () => boolean,
  timeoutMs = 15_000,
  stepMs = 20,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error("condition not reached in time");
    await sleep(stepMs);
  }
}
