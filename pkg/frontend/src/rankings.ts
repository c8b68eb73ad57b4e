// Live rankings: poll GET /rankings, keep the last good table, and flag
// it as stale while the service is unreachable.

import { RankingRow, StudyApi } from "./api.js";

export interface RankingsSnapshot {
  rows: RankingRow[];
  stale: boolean;
}

export type RankingsListener = (snapshot: RankingsSnapshot) => void;

export function sortRows(rows: RankingRow[]): RankingRow[] {
  return [...rows].sort((a, b) => b.rating - a.rating || a.model.localeCompare(b.model));
}

export class RankingsPoller {
  private rows: RankingRow[] = [];
  private stale = false;
  private timer: ReturnType<typeof setInterval> | null = null;
  private listeners: RankingsListener[] = [];

  constructor(
    private readonly api: StudyApi,
    private readonly intervalMs = 5000,
  ) {}

  subscribe(listener: RankingsListener): void {
    this.listeners.push(listener);
    listener(this.snapshot());
  }

  snapshot(): RankingsSnapshot {
    return { rows: this.rows, stale: this.stale };
  }

  async refresh(): Promise<void> {
    try {
      this.rows = sortRows(await this.api.fetchRankings());
      this.stale = false;
    } catch {
      this.stale = true; // keep the last good table on screen
    }
    const snapshot = this.snapshot();
    for (const listener of this.listeners) {
      listener(snapshot);
    }
  }

  start(): void {
    if (this.timer !== null) return;
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
