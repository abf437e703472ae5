// Organizer's side: a poll setup form and a live results dashboard. The
// dashboard shows the latest aggregate response verbatim; it never ranks or
// tallies anything itself.

import { ApiError, PollApi, type AggregateSnapshot } from "./api";
import type { CreatePollRequest, PollMode } from "./types";

export class OrganizerDashboard {
  last: AggregateSnapshot | null = null;
  lastError: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: PollApi,
    private root: HTMLElement,
    private pollId: string,
    private intervalMs = 2000,
  ) {}

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async refresh(): Promise<void> {
    try {
      this.last = await this.api.aggregate(this.pollId);
      this.lastError = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.last = null;
        this.lastError = "empty"; // no completed sessions yet
      } else {
        this.lastError = err instanceof Error ? err.message : String(err);
      }
    }
    this.render();
  }

  render(): void {
    this.root.innerHTML = "";
    const box = document.createElement("div");
    box.className = "dashboard";
    this.root.appendChild(box);

    if (this.lastError === "empty" || (this.lastError === null && this.last === null)) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent = "No completed responses yet. Share the respondent link to get started.";
      box.appendChild(empty);
      return;
    }
    if (this.lastError !== null) {
      const err = document.createElement("p");
      err.className = "error";
      err.textContent = `Could not refresh results (${this.lastError}).`;
      box.appendChild(err);
      if (this.last === null) return;
    }
    const agg = this.last!.payload;

    const status = document.createElement("p");
    status.className = `status status-${agg.status}`;
    status.textContent = `status: ${agg.status} — ${agg.respondents} completed respondent(s)`;
    box.appendChild(status);

    if (agg.status === "cyclic") {
      const note = document.createElement("p");
      note.className = "cyclic-note";
      note.textContent =
        "The pairwise majorities cycle: some respondents were not single-peaked " +
        "(this poll does not verify answers), so no consistent ranking exists.";
      box.appendChild(note);
    }
    if (agg.status === "partial") {
      const note = document.createElement("p");
      note.className = "partial-note";
      note.textContent = "Waiting for an odd number of respondents; showing margins only.";
      box.appendChild(note);
    }
    if (agg.winner !== undefined && agg.ranking !== undefined) {
      const winner = document.createElement("h2");
      winner.className = "winner";
      winner.textContent = `winner: ${agg.winner}`;
      const ranking = document.createElement("p");
      ranking.className = "aggregate-ranking";
      ranking.textContent = agg.ranking.join(" > ");
      box.append(winner, ranking);
    }

    box.appendChild(this.marginsTable(agg.margins));
  }

  private marginsTable(margins: number[][]): HTMLTableElement {
    const table = document.createElement("table");
    table.className = "margins";
    for (const row of margins) {
      const tr = document.createElement("tr");
      for (const cell of row) {
        const td = document.createElement("td");
        td.textContent = String(cell);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    return table;
  }
}

/** Poll creation form; posts exactly the JSON body the service validates. */
export function renderPollForm(
  api: PollApi,
  root: HTMLElement,
  onCreated: (pollId: string) => void,
): void {
  root.innerHTML = "";
  const form = document.createElement("form");
  form.className = "poll-form";
  form.innerHTML = `
    <label>name <input name="name" value="poll"></label>
    <label>alternatives (comma separated) <input name="alternatives" placeholder="a,b,c,d"></label>
    <label>mode
      <select name="mode">
        <option value="ordinal-known">axis known</option>
        <option value="cardinal-known">numeric positions known</option>
        <option value="unknown-positions">nothing known</option>
      </select>
    </label>
    <label class="axis-row">axis, left to right (comma separated) <input name="axis"></label>
    <label class="positions-row hidden">positions (name=decimal, comma separated) <input name="positions"></label>
    <label><input type="checkbox" name="robust"> robust (verify and fall back)</label>
    <button type="submit">create poll</button>
    <p class="form-error error hidden"></p>
  `;
  const modeSelect = form.querySelector<HTMLSelectElement>('[name="mode"]')!;
  modeSelect.addEventListener("change", () => {
    form.querySelector(".axis-row")!.classList.toggle("hidden", modeSelect.value !== "ordinal-known");
    form.querySelector(".positions-row")!.classList.toggle("hidden", modeSelect.value !== "cardinal-known");
  });
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    const alternatives = String(data.get("alternatives") ?? "")
      .split(",")
      .map((s) => s.trim())
      .filter(Boolean);
    const mode = String(data.get("mode")) as PollMode;
    const req: CreatePollRequest = {
      name: String(data.get("name") ?? "poll"),
      alternatives,
      mode,
      robust: data.get("robust") !== null,
    };
    if (mode === "ordinal-known") {
      req.axis = String(data.get("axis") ?? "")
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
    }
    if (mode === "cardinal-known") {
      req.positions = {};
      for (const part of String(data.get("positions") ?? "").split(",")) {
        const [name, value] = part.split("=", 2);
        if (name && value) req.positions[name.trim()] = value.trim();
      }
    }
    api
      .createPoll(req)
      .then(onCreated)
      .catch((err) => {
        const line = form.querySelector<HTMLParagraphElement>(".form-error")!;
        line.classList.remove("hidden");
        line.textContent = err instanceof Error ? err.message : String(err);
      });
  });
  root.appendChild(form);
}
