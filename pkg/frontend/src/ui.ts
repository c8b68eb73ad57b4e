// DOM layer. Rendering is rebuilt per assignment; the only state the UI
// holds is which videos have finished a full playback, which gates the
// choice buttons.

import { PairAssignment, RankingRow, Side } from "./api.js";
import { SessionController, SessionSnapshot } from "./session.js";
import { RankingsSnapshot } from "./rankings.js";

const CRITERIA_TEXT =
  "Pick the clip with better lip synchronization, overall coherence, and visual quality.";

export interface PairViewHooks {
  onChoice: (side: Side) => void;
  onRetry: () => void;
}

export function renderPair(
  root: HTMLElement,
  assignment: PairAssignment,
  baseUrl: string,
  hooks: PairViewHooks,
): void {
  root.replaceChildren();

  const criteria = document.createElement("p");
  criteria.className = "criteria";
  criteria.textContent = CRITERIA_TEXT;
  root.appendChild(criteria);

  const stage = document.createElement("div");
  stage.className = "stage";
  root.appendChild(stage);

  const leftUrl = assignment.left_is_a ? assignment.media_url_a : assignment.media_url_b;
  const rightUrl = assignment.left_is_a ? assignment.media_url_b : assignment.media_url_a;
  const played = { left: false, right: false };
  const buttons: HTMLButtonElement[] = [];

  const controls = document.createElement("div");
  controls.className = "controls";

  const playButton = document.createElement("button");
  playButton.dataset.testid = "play-both";
  playButton.textContent = "Play both";

  const videos: HTMLVideoElement[] = [];
  for (const [side, url] of [["left", leftUrl], ["right", rightUrl]] as const) {
    const panel = document.createElement("div");
    panel.className = "panel";

    const video = document.createElement("video");
    video.dataset.testid = `video-${side}`;
    video.muted = true;
    video.preload = "auto";
    video.src = `${baseUrl}${url}`;
    // Manual looping: keep replaying, but remember the completed pass so
    // the choice buttons unlock only after a full viewing of both clips.
    video.addEventListener("ended", () => {
      played[side] = true;
      if (played.left && played.right) {
        for (const button of buttons) button.disabled = false;
      }
      void video.play()?.catch(() => undefined);
    });
    video.addEventListener("error", () => {
      renderMediaFailure(root, hooks);
    });
    videos.push(video);
    panel.appendChild(video);

    const button = document.createElement("button");
    button.dataset.testid = `choose-${side}`;
    button.textContent = side === "left" ? "Left is better" : "Right is better";
    button.disabled = true;
    button.addEventListener("click", () => hooks.onChoice(side));
    buttons.push(button);
    panel.appendChild(button);
    stage.appendChild(panel);
  }

  playButton.addEventListener("click", () => {
    for (const video of videos) {
      void video.play()?.catch(() => undefined);
    }
  });
  controls.appendChild(playButton);
  root.appendChild(controls);
}

function renderMediaFailure(root: HTMLElement, hooks: PairViewHooks): void {
  root.replaceChildren();
  const card = document.createElement("div");
  card.className = "error-card";
  card.dataset.testid = "media-error";
  const message = document.createElement("p");
  message.textContent = "A video failed to load. The pair was released.";
  card.appendChild(message);
  const retry = document.createElement("button");
  retry.dataset.testid = "retry";
  retry.textContent = "Load another pair";
  retry.addEventListener("click", () => hooks.onRetry());
  card.appendChild(retry);
  root.appendChild(card);
}

export function renderStatus(root: HTMLElement, snapshot: SessionSnapshot): void {
  const completed = root.querySelector("[data-testid=completed]");
  if (completed) {
    completed.textContent = `${snapshot.completed} votes submitted`;
  }
  const phase = root.querySelector("[data-testid=phase]");
  if (phase) {
    phase.textContent =
      snapshot.phase === "error" ? `error: ${snapshot.lastError ?? "unknown"}` : snapshot.phase;
  }
}

export function renderRankings(root: HTMLElement, snapshot: RankingsSnapshot): void {
  root.replaceChildren();
  if (snapshot.stale) {
    const banner = document.createElement("div");
    banner.className = "stale-banner";
    banner.dataset.testid = "stale-banner";
    banner.textContent = "Service unreachable; showing the last known table.";
    root.appendChild(banner);
  }
  const table = document.createElement("table");
  table.dataset.testid = "rankings-table";
  const head = table.createTHead().insertRow();
  for (const title of ["model", "rating", "interval", "games"]) {
    const cell = document.createElement("th");
    cell.textContent = title;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of snapshot.rows) {
    const tr = body.insertRow();
    tr.dataset.testid = "rankings-row";
    tr.insertCell().textContent = row.model;
    tr.insertCell().textContent = row.rating.toFixed(1);
    tr.insertCell().textContent = ciText(row);
    tr.insertCell().textContent = String(row.games);
  }
  root.appendChild(table);
}

function ciText(row: RankingRow): string {
  if (row.ci_low === row.rating && row.ci_high === row.rating) {
    return "-";
  }
  return `[${row.ci_low.toFixed(1)}, ${row.ci_high.toFixed(1)}]`;
}

export function wireSession(
  session: SessionController,
  pairRoot: HTMLElement,
  statusRoot: HTMLElement,
  baseUrl: string,
): void {
  session.subscribe((snapshot) => {
    renderStatus(statusRoot, snapshot);
    if (snapshot.phase === "ready" && snapshot.assignment) {
      renderPair(pairRoot, snapshot.assignment, baseUrl, {
        onChoice: (side) => void session.choose(side),
        onRetry: () => void session.release(),
      });
    }
  });
}
