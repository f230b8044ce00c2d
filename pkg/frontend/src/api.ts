import type { Dashboard, JudgmentAck, NextResponse, Summary, Verdict } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service returned ${status}: ${detail}`);
  }
}

export type FetchFn = typeof fetch;

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export interface SessionApi {
  next(session: string, annotator: string): Promise<NextResponse>;
  submit(session: string, itemId: string, verdict: Verdict, annotator: string): Promise<JudgmentAck>;
  summary(session: string): Promise<Summary>;
  dashboard(session: string): Promise<Dashboard>;
}

/** Thin client for the annotation service. Network failures surface as the
 * fetch rejection (usually TypeError); HTTP errors become ApiError so the
 * retry queue can tell a dead network from a rejected request. */
export class ServiceClient implements SessionApi {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchFn = globalThis.fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`);
    if (!response.ok) throw new ApiError(response.status, await readDetail(response));
    return (await response.json()) as T;
  }

  next(session: string, annotator: string): Promise<NextResponse> {
    const query = new URLSearchParams({ annotator });
    return this.get(`/sessions/${encodeURIComponent(session)}/next?${query}`);
  }

  async submit(session: string, itemId: string, verdict: Verdict, annotator: string): Promise<JudgmentAck> {
    const response = await this.fetchFn(`${this.base}/sessions/${encodeURIComponent(session)}/judgments`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ item_id: itemId, verdict, annotator }),
    });
    if (!response.ok) throw new ApiError(response.status, await readDetail(response));
    return (await response.json()) as JudgmentAck;
  }

  summary(session: string): Promise<Summary> {
    return this.get(`/sessions/${encodeURIComponent(session)}/summary`);
  }

  dashboard(session: string): Promise<Dashboard> {
    return this.get(`/sessions/${encodeURIComponent(session)}/dashboard`);
  }
}
