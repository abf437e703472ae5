// Hash routes: #/respond/<pollId> for voters, #/organize/<pollId> for the
// live dashboard, anything else shows the poll creation form.

import { PollApi } from "./api";
import { OrganizerDashboard, renderPollForm } from "./organizer";
import { RespondentFlow } from "./respondent";
import "./style.css";

const api = new PollApi("");
let dashboard: OrganizerDashboard | null = null;

function route(): void {
  const root = document.getElementById("app")!;
  dashboard?.stop();
  dashboard = null;

  const match = /^#\/(respond|organize)\/(.+)$/.exec(window.location.hash);
  if (match) {
    const [, kind, pollId] = match;
    if (kind === "respond") {
      void new RespondentFlow(api, root, pollId!).start();
    } else {
      dashboard = new OrganizerDashboard(api, root, pollId!);
      dashboard.start();
    }
    return;
  }
  renderPollForm(api, root, (pollId) => {
    const links = document.createElement("div");
    links.className = "share-links";
    links.innerHTML = `
      <p>poll created: <code>${pollId}</code></p>
      <p><a href="#/respond/${pollId}">respond</a> · <a href="#/organize/${pollId}">live results</a></p>
    `;
    root.appendChild(links);
  });
}

window.addEventListener("hashchange", route);
route();
