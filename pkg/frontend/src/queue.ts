import { ApiError } from "./api.js";
import type { JudgmentAck, Verdict } from "./types.js";

export interface QueuedVerdict {
  itemId: string;
  verdict: Verdict;
  queuedAt: number;
}

export interface DrainResult {
  delivered: number;
  /** items the service refused (4xx); dropped from the queue */
  rejected: { itemId: string; detail: string }[];
  /** true when a network failure stopped the drain early */
  stalled: boolean;
  lastAck: JudgmentAck | null;
}

type SubmitFn = (itemId: string, verdict: Verdict) => Promise<JudgmentAck>;

/** FIFO verdict buffer between the judge view and the service.
 *
 * Verdicts go in immediately on keypress; drain() pushes them to the
 * service in order and stops at the first network failure, leaving the
 * rest queued for the next attempt. A newer verdict for a queued item
 * replaces the old one (the service would resolve last-write-wins anyway,
 * so there is no point delivering both). The queue persists, so a reload
 * mid-outage loses nothing.
 */
export class RetryQueue {
  private items: QueuedVerdict[] = [];

  constructor(
    private readonly storage: Pick<Storage, "getItem" | "setItem" | "removeItem">,
    private readonly key: string,
  ) {
    const saved = storage.getItem(key);
    if (saved) {
      try {
        this.items = JSON.parse(saved) as QueuedVerdict[];
      } catch {
        storage.removeItem(key);
      }
    }
  }

  get size(): number {
    return this.items.length;
  }

  has(itemId: string): boolean {
    return this.items.some((q) => q.itemId === itemId);
  }

  pending(): QueuedVerdict[] {
    return [...this.items];
  }

  enqueue(itemId: string, verdict: Verdict, now: number = Date.now()): void {
    this.items = this.items.filter((q) => q.itemId !== itemId);
    this.items.push({ itemId, verdict, queuedAt: now });
    this.persist();
  }

  async drain(submit: SubmitFn): Promise<DrainResult> {
    const result: DrainResult = { delivered: 0, rejected: [], stalled: false, lastAck: null };
    while (this.items.length > 0) {
      const head = this.items[0]!;
      try {
        result.lastAck = await submit(head.itemId, head.verdict);
        result.delivered += 1;
      } catch (error) {
        if (error instanceof ApiError && error.status >= 400 && error.status < 500) {
          // the service will never accept this one; keep the rest moving
          result.rejected.push({ itemId: head.itemId, detail: error.detail });
        } else {
          result.stalled = true;
          break;
        }
      }
      this.items.shift();
      this.persist();
    }
    return result;
  }

  private persist(): void {
    if (this.items.length === 0) this.storage.removeItem(this.key);
    else this.storage.setItem(this.key, JSON.stringify(this.items));
  }
}

export function queueKey(session: string, annotator: string): string {
  return `kgbench-queue:${session}:${annotator}`;
}
