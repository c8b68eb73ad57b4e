// Entry point: ask for the annotator id once (kept in localStorage, the
// only client-side persistence), then run the study session and the
// rankings poller against the service.

import { StudyApi } from "./api.js";
import { RankingsPoller } from "./rankings.js";
import { SessionController } from "./session.js";
import { renderRankings, wireSession } from "./ui.js";

const ANNOTATOR_KEY = "study-annotator-id";

function annotatorId(): string {
  const stored = localStorage.getItem(ANNOTATOR_KEY);
  if (stored && stored.trim()) {
    return stored;
  }
  let entered: string | null = null;
  while (!entered || !entered.trim()) {
    entered = window.prompt("Annotator id:");
  }
  localStorage.setItem(ANNOTATOR_KEY, entered.trim());
  return entered.trim();
}

function main(): void {
  const baseUrl = (document.body.dataset.serviceUrl ?? "").replace(/\/$/, "");
  const pairRoot = document.getElementById("pair");
  const rankingsRoot = document.getElementById("rankings");
  if (!pairRoot || !rankingsRoot) {
    throw new Error("missing #pair or #rankings containers");
  }

  const api = new StudyApi(baseUrl);
  const session = new SessionController(api, annotatorId());
  wireSession(session, pairRoot, document.body, baseUrl);
  void session.start();

  const poller = new RankingsPoller(api);
  poller.subscribe((snapshot) => renderRankings(rankingsRoot, snapshot));
  poller.start();
}

main();
