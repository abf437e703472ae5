// Wire types, mirroring the poll service's JSON bodies exactly.

export interface Query {
  left: string;
  right: string;
}

export interface Progress {
  asked: number;
  bound: number;
}

export interface SessionResult {
  ranking: string[];
  queries_used: number;
  verified: boolean;
  fell_back: boolean;
}

export type SessionView =
  | { query: Query; progress: Progress }
  | { done: true; result: SessionResult }
  | { failed: true; error: string };

export type OpenedSession = SessionView & { session_id: string };

export interface Aggregate {
  status: "complete" | "partial" | "cyclic";
  ranking?: string[];
  winner?: string;
  margins: number[][];
  respondents: number;
}

export type PollMode = "ordinal-known" | "cardinal-known" | "unknown-positions";

export interface CreatePollRequest {
  name: string;
  alternatives: string[];
  mode: PollMode;
  axis?: string[];
  positions?: Record<string, string>;
  robust: boolean;
}

export function isDone(view: SessionView): view is { done: true; result: SessionResult } {
  return "done" in view && view.done;
}

export function isFailed(view: SessionView): view is { failed: true; error: string } {
  return "failed" in view;
}
