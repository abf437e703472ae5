// Contract stubs: replay wire traffic recorded from the real service
// (tests/fixtures/*.json, produced by scripts/record_fixtures.py) and verify
// the client sends exactly what the protocol expects.

import type { SessionView } from "../src/types";

export interface RecordedStep {
  view: { query: { left: string; right: string }; progress: { asked: number; bound: number } };
  answer: "left" | "right";
  asked: number;
}

export interface SessionFixture {
  poll_request: unknown;
  poll_id: string;
  session_id: string;
  steps: RecordedStep[];
  final_view: SessionView;
  result: { ranking: string[]; queries_used: number; verified: boolean; fell_back: boolean };
}

export interface StubOptions {
  /** answer indices that fail once with a network error before succeeding */
  failAnswersOnce?: number[];
  /** answer index from which the session responds 409 (expired) */
  expireAt?: number;
}

export interface SessionStub {
  fetchFn: typeof fetch;
  counts: { opens: number; answersApplied: number; answerRequests: number };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function sessionStub(fx: SessionFixture, opts: StubOptions = {}): SessionStub {
  let cursor = 0;
  const counts = { opens: 0, answersApplied: 0, answerRequests: 0 };
  const failOnce = new Set(opts.failAnswersOnce ?? []);

  const currentView = (): unknown => (cursor < fx.steps.length ? fx.steps[cursor]!.view : fx.final_view);

  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";

    if (method === "POST" && url === `/polls/${fx.poll_id}/sessions`) {
      counts.opens += 1;
      cursor = 0;
      return json({ session_id: fx.session_id, ...(currentView() as object) }, 201);
    }
    if (method === "GET" && url === `/sessions/${fx.session_id}/next`) {
      return json(currentView());
    }
    if (method === "POST" && url === `/sessions/${fx.session_id}/answer`) {
      counts.answerRequests += 1;
      const body = JSON.parse(String(init?.body)) as { prefer: string; asked?: number };
      if (opts.expireAt !== undefined && cursor >= opts.expireAt) {
        return json({ detail: "session expired" }, 409);
      }
      if (failOnce.has(cursor)) {
        failOnce.delete(cursor);
        throw new TypeError("network down");
      }
      if (cursor >= fx.steps.length) {
        return json({ detail: "not awaiting an answer" }, 409);
      }
      const step = fx.steps[cursor]!;
      if (body.asked !== step.asked) {
        return json({ detail: `answer targets question ${body.asked}` }, 409);
      }
      if (body.prefer !== step.answer) {
        throw new Error(`scripted respondent drifted: expected ${step.answer}, got ${body.prefer}`);
      }
      counts.answersApplied += 1;
      cursor += 1;
      return json(currentView());
    }
    if (method === "GET" && url === `/sessions/${fx.session_id}/result`) {
      return cursor >= fx.steps.length ? json(fx.result) : json({ detail: "not completed" }, 409);
    }
    throw new Error(`contract stub: unexpected request ${method} ${url}`);
  }) as typeof fetch;

  return { fetchFn, counts };
}

/** Serves a scripted sequence of raw aggregate bodies (or 409 for null). */
export function aggregateStub(pollId: string, bodies: (string | null)[]): { fetchFn: typeof fetch } {
  let calls = 0;
  const fetchFn = (async (input: RequestInfo | URL): Promise<Response> => {
    const url = String(input);
    if (url !== `/polls/${pollId}/aggregate`) {
      throw new Error(`contract stub: unexpected request ${url}`);
    }
    const body = bodies[Math.min(calls, bodies.length - 1)]!;
    calls += 1;
    if (body === null) {
      return json({ detail: "no completed sessions yet" }, 409);
    }
    return new Response(body, { status: 200, headers: { "content-type": "application/json" } });
  }) as typeof fetch;
  return { fetchFn };
}
