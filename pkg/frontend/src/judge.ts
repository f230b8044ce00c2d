import type { SessionApi } from "./api.js";
import type { RetryQueue } from "./queue.js";
import type { Estimate, NextPending, Summary, Tallies, Verdict } from "./types.js";

export type JudgePhase = "loading" | "judging" | "syncing" | "done" | "error";

export interface JudgeState {
  phase: JudgePhase;
  current: NextPending | null;
  summary: Summary | null;
  tallies: Tallies | null;
  estimate: Estimate | null;
  queueSize: number;
  /** judged according to the service plus verdicts still in the local queue */
  judgedLocal: number;
  total: number;
  message: string | null;
}

/** The judging loop: show an item, take a verdict, advance.
 *
 * The server is the source of truth for what comes next; the local queue
 * only bridges network failures. The summary screen is shown strictly
 * after the queue has drained, so its numbers are always the service's.
 */
export class JudgeFlow {
  private state: JudgeState = {
    phase: "loading",
    current: null,
    summary: null,
    tallies: null,
    estimate: null,
    queueSize: 0,
    judgedLocal: 0,
    total: 0,
    message: null,
  };
  private busy = false;

  constructor(
    private readonly client: SessionApi,
    private readonly queue: RetryQueue,
    private readonly session: string,
    private readonly annotator: string,
    private readonly onChange: (state: JudgeState) => void = () => {},
  ) {}

  snapshot(): JudgeState {
    return { ...this.state };
  }

  private emit(patch: Partial<JudgeState>): void {
    this.state = { ...this.state, ...patch, queueSize: this.queue.size };
    this.onChange(this.state);
  }

  async start(): Promise<void> {
    await this.refresh();
  }

  /** Drain what we can, then ask the service what to show. */
  async refresh(): Promise<void> {
    if (this.queue.size > 0) {
      const drained = await this.queue.drain((itemId, verdict) =>
        this.client.submit(this.session, itemId, verdict, this.annotator),
      );
      if (drained.lastAck) {
        this.emit({ tallies: drained.lastAck.tallies, estimate: drained.lastAck.estimate });
      }
    }

    let next;
    try {
      next = await this.client.next(this.session, this.annotator);
    } catch (error) {
      if (this.queue.size > 0) {
        this.emit({ phase: "syncing", message: "service unreachable, verdicts queued locally" });
      } else {
        this.emit({ phase: "error", message: String(error) });
      }
      return;
    }

    if (next.done) {
      if (this.queue.size > 0) {
        // everything shown was judged but deliveries are stuck: not done yet
        this.emit({ phase: "syncing", message: "waiting for queued verdicts to reach the service" });
        return;
      }
      const summary = await this.client.summary(this.session);
      this.emit({
        phase: "done",
        current: null,
        summary,
        tallies: summary.tallies,
        estimate: summary.estimate,
        judgedLocal: next.judged,
        total: next.total,
        message: null,
      });
      return;
    }

    if (this.queue.has(next.item.id)) {
      // the verdict for this item exists locally but never arrived
      this.emit({ phase: "syncing", message: "waiting for queued verdicts to reach the service" });
      return;
    }

    this.emit({
      phase: "judging",
      current: next,
      judgedLocal: next.judged + this.queue.size,
      total: next.total,
      message: null,
    });
  }

  async verdict(verdict: Verdict): Promise<void> {
    if (this.busy || this.state.phase !== "judging" || !this.state.current) return;
    this.busy = true;
    try {
      this.queue.enqueue(this.state.current.item.id, verdict);
      this.emit({ judgedLocal: this.state.judgedLocal + 1 });
      await this.refresh();
    } finally {
      this.busy = false;
    }
  }
}

export const VERDICT_KEYS: Record<string, Verdict> = {
  s: "same",
  d: "different",
  u: "unsure",
};

export function formatEstimate(estimate: Estimate | null): string {
  if (!estimate) return "no estimate yet";
  if (estimate.empty) return `no estimate (${estimate.reason})`;
  const [low, high] = estimate.interval;
  return (
    `precision ${estimate.point.toFixed(4)} ` +
    `[${low.toFixed(4)}, ${high.toFixed(4)}] ` +
    `over ${estimate.n_judged} judged (max error ±${(estimate.max_error * 100).toFixed(1)}%)`
  );
}

export function formatTallies(tallies: Tallies | null): string {
  if (!tallies) return "";
  return `same ${tallies.same} · different ${tallies.different} · unsure ${tallies.unsure} · pending ${tallies.pending}`;
}
