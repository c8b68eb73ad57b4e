// Typed client for the study service. The UI talks to exactly three
// endpoints: GET /pair, POST /vote, GET /rankings. The vote payload
// carries only the served pair token and a left/right choice; mapping a
// side back to a model happens on the server, so the client can never
// fabricate a winner.

export interface PairAssignment {
  pair_id: string;
  media_url_a: string;
  media_url_b: string;
  left_is_a: boolean;
  expires_in_s: number;
}

export interface RankingRow {
  model: string;
  rating: number;
  ci_low: number;
  ci_high: number;
  games: number;
}

export type Side = "left" | "right";

export type VoteOutcome = "recorded" | "duplicate" | "gone";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const RETRY_DELAYS_MS = [250, 1000];

export class StudyApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async fetchPair(annotator: string): Promise<PairAssignment> {
    const url = `${this.baseUrl}/pair?annotator=${encodeURIComponent(annotator)}`;
    const response = await this.fetchFn(url);
    if (!response.ok) {
      throw new ApiError(response.status, `pair request failed (${response.status})`);
    }
    return (await response.json()) as PairAssignment;
  }

  // Votes are idempotent by construction: the pair token identifies one
  // assignment, and the server rejects a second vote for it with 409.
  // Network failures therefore retry the identical request; at worst the
  // first attempt landed and the retry reports "duplicate".
  async submitVote(pairId: string, choice: Side, annotator: string): Promise<VoteOutcome> {
    const body = JSON.stringify({ pair_id: pairId, choice, annotator });
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= RETRY_DELAYS_MS.length; attempt += 1) {
      if (attempt > 0) {
        await delay(RETRY_DELAYS_MS[attempt - 1] ?? 1000);
      }
      let response: Response;
      try {
        response = await this.fetchFn(`${this.baseUrl}/vote`, {
          method: "POST",
          headers: { "content-type": "application/json" },
          body,
        });
      } catch (error) {
        lastError = error;
        continue;
      }
      if (response.ok) return "recorded";
      if (response.status === 409) return "duplicate";
      if (response.status === 404) return "gone";
      throw new ApiError(response.status, `vote failed (${response.status})`);
    }
    throw lastError instanceof Error ? lastError : new Error("vote failed: network error");
  }

  async fetchRankings(): Promise<RankingRow[]> {
    const response = await this.fetchFn(`${this.baseUrl}/rankings`);
    if (!response.ok) {
      throw new ApiError(response.status, `rankings request failed (${response.status})`);
    }
    const payload = (await response.json()) as { models: RankingRow[] };
    return payload.models;
  }
}

function delay(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
