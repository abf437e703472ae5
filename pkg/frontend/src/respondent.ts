// The respondent's side of an elicitation conversation: one comparison at a
// time, two large buttons, a progress line promising "question k of at most
// B". Exactly one of {current question, final ranking} is ever on screen.

import { ApiError, PollApi } from "./api";
import { isDone, isFailed, type SessionView } from "./types";

export class RespondentFlow {
  session_id: string | null = null;
  view: SessionView | null = null;
  inFlight = false;
  questionScreens = 0;
  private lastCounted = -1; // progress.asked of the last counted question screen
  private lastError: string | null = null;
  private pendingAnswer: "left" | "right" | null = null;

  constructor(
    private api: PollApi,
    private root: HTMLElement,
    private pollId: string,
  ) {}

  async start(): Promise<void> {
    this.session_id = null;
    this.view = null;
    this.questionScreens = 0;
    this.lastCounted = -1;
    this.lastError = null;
    try {
      const opened = await this.api.openSession(this.pollId);
      this.session_id = opened.session_id;
      this.view = opened;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
    }
    this.render();
  }

  /** Submit the clicked side. Ignored while a request is in flight, so a
   * double click can never send two answers for one question. */
  async choose(side: "left" | "right"): Promise<void> {
    if (this.inFlight || !this.view || !("query" in this.view) || !this.session_id) return;
    this.inFlight = true;
    this.pendingAnswer = side;
    this.render();
    try {
      this.view = await this.api.answer(this.session_id, side, this.view.progress.asked);
      this.lastError = null;
      this.pendingAnswer = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.lastError = "expired";
      } else {
        this.lastError = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.inFlight = false;
    }
    this.render();
  }

  /** Re-send the answer that failed on the network; never happens silently. */
  async retry(): Promise<void> {
    const side = this.pendingAnswer;
    if (side === null) return;
    this.lastError = null;
    this.pendingAnswer = null;
    await this.choose(side);
  }

  render(): void {
    this.root.innerHTML = "";
    const box = document.createElement("div");
    box.className = "respondent";
    this.root.appendChild(box);

    if (this.lastError === "expired") {
      const note = document.createElement("p");
      note.className = "error";
      note.textContent = "This session expired while you were away.";
      const restart = document.createElement("button");
      restart.className = "restart";
      restart.textContent = "Start over";
      restart.addEventListener("click", () => void this.start());
      box.append(note, restart);
      return;
    }
    if (this.lastError !== null) {
      const note = document.createElement("p");
      note.className = "error";
      note.textContent = `Could not reach the poll server (${this.lastError}). Your answer was not recorded.`;
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "Try again";
      retry.addEventListener("click", () => void this.retry());
      box.append(note, retry);
      return;
    }
    if (!this.view) {
      box.textContent = "Opening your session…";
      return;
    }
    if (isFailed(this.view)) {
      const note = document.createElement("p");
      note.className = "error";
      note.textContent = this.view.error;
      return;
    }
    if (isDone(this.view)) {
      const heading = document.createElement("h2");
      heading.textContent = "Your ranking";
      const list = document.createElement("ol");
      list.className = "final-ranking";
      for (const name of this.view.result.ranking) {
        const item = document.createElement("li");
        item.textContent = name;
        list.appendChild(item);
      }
      const note = document.createElement("p");
      note.className = "query-count";
      note.textContent = `Recovered from ${this.view.result.queries_used} answers.`;
      box.append(heading, list, note);
      return;
    }

    const { query, progress } = this.view;
    if (progress.asked !== this.lastCounted) {
      this.questionScreens += 1; // count distinct questions, not re-renders
      this.lastCounted = progress.asked;
    }
    const prompt = document.createElement("h2");
    prompt.textContent = "Which do you prefer?";
    const choices = document.createElement("div");
    choices.className = "choices";
    for (const side of ["left", "right"] as const) {
      const button = document.createElement("button");
      button.className = `choice ${side}`;
      button.textContent = query[side];
      button.disabled = this.inFlight;
      button.addEventListener("click", () => void this.choose(side));
      choices.appendChild(button);
    }
    const progressLine = document.createElement("p");
    progressLine.className = "progress";
    progressLine.textContent = `question ${progress.asked + 1} of at most ${progress.bound}`;
    box.append(prompt, choices, progressLine);
  }
}
