// Thin client for the poll service. The UI never derives preference logic
// itself: every query, bound, and result shown comes from these responses.

import type { Aggregate, CreatePollRequest, OpenedSession, SessionResult, SessionView } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: string,
  ) {
    super(`HTTP ${status}: ${body}`);
  }
}

export interface AggregateSnapshot {
  payload: Aggregate;
  raw: string; // exact response bytes, kept so the dashboard displays them verbatim
}

export class PollApi {
  constructor(
    private base: string = "",
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return resp;
  }

  private post(path: string, body: unknown): Promise<Response> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createPoll(req: CreatePollRequest): Promise<string> {
    const resp = await this.post("/polls", req);
    return (await resp.json()).poll_id as string;
  }

  async openSession(pollId: string): Promise<OpenedSession> {
    const resp = await this.post(`/polls/${pollId}/sessions`, {});
    return (await resp.json()) as OpenedSession;
  }

  async next(sessionId: string): Promise<SessionView> {
    const resp = await this.request(`/sessions/${sessionId}/next`);
    return (await resp.json()) as SessionView;
  }

  /** Submit one answer; `asked` echoes which question is being answered so a
   * duplicated request can never answer the following question. */
  async answer(sessionId: string, prefer: "left" | "right", asked: number): Promise<SessionView> {
    const resp = await this.post(`/sessions/${sessionId}/answer`, { prefer, asked });
    return (await resp.json()) as SessionView;
  }

  async result(sessionId: string): Promise<SessionResult> {
    const resp = await this.request(`/sessions/${sessionId}/result`);
    return (await resp.json()) as SessionResult;
  }

  async aggregate(pollId: string): Promise<AggregateSnapshot> {
    const resp = await this.request(`/polls/${pollId}/aggregate`);
    const raw = await resp.text();
    return { payload: JSON.parse(raw) as Aggregate, raw };
  }
}
