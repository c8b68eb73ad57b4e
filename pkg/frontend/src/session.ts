// Session state machine: one active assignment at a time, a vote can be
// cast only while one is active, and after voting the next pair is
// fetched. Rapid repeated choices (double clicks) are swallowed by the
// in-flight guard, so each assignment produces at most one POST /vote.

import { PairAssignment, Side, StudyApi } from "./api.js";

export type SessionPhase = "idle" | "loading" | "ready" | "submitting" | "error";

export interface SessionSnapshot {
  phase: SessionPhase;
  assignment: PairAssignment | null;
  completed: number;
  lastError: string | null;
}

export type SessionListener = (snapshot: SessionSnapshot) => void;

export class SessionController {
  private phase: SessionPhase = "idle";
  private assignment: PairAssignment | null = null;
  private completed = 0;
  private lastError: string | null = null;
  private listeners: SessionListener[] = [];

  constructor(
    private readonly api: StudyApi,
    readonly annotator: string,
  ) {}

  subscribe(listener: SessionListener): void {
    this.listeners.push(listener);
    listener(this.snapshot());
  }

  snapshot(): SessionSnapshot {
    return {
      phase: this.phase,
      assignment: this.assignment,
      completed: this.completed,
      lastError: this.lastError,
    };
  }

  async start(): Promise<void> {
    await this.fetchNext();
  }

  // Releases the current assignment (after a media failure) and serves a
  // fresh one; the abandoned assignment simply expires server side.
  async release(): Promise<void> {
    await this.fetchNext();
  }

  async choose(side: Side): Promise<"counted" | "absorbed" | "ignored"> {
    if (this.phase !== "ready" || this.assignment === null) {
      return "ignored";
    }
    const pairId = this.assignment.pair_id;
    this.setPhase("submitting");
    let outcome;
    try {
      outcome = await this.api.submitVote(pairId, side, this.annotator);
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.setPhase("error");
      return "ignored";
    }
    if (outcome === "recorded") {
      this.completed += 1;
      await this.fetchNext();
      return "counted";
    }
    // 409 (already voted) or 404 (expired): fetch a fresh pair without
    // counting; the server-side log is the single source of truth.
    await this.fetchNext();
    return "absorbed";
  }

  private async fetchNext(): Promise<void> {
    this.setPhase("loading");
    this.assignment = null;
    try {
      this.assignment = await this.api.fetchPair(this.annotator);
      this.lastError = null;
      this.setPhase("ready");
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.setPhase("error");
    }
  }

  private setPhase(phase: SessionPhase): void {
    this.phase = phase;
    const snapshot = this.snapshot();
    for (const listener of this.listeners) {
      listener(snapshot);
    }
  }
}
