// End-to-end check against the real study service: a scripted session
// casts five votes (each with a double click), the persisted log gains
// exactly five entries, and the rankings view ordering matches the
// service's JSON. Requires the Python package to be installed; skips
// cleanly when it is not.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StudyApi } from "../src/api.js";
import { RankingsPoller } from "../src/rankings.js";
import { SessionController } from "../src/session.js";

const PORT = 8734;
const BASE = `http://127.0.0.1:${PORT}`;

function serviceAvailable(): boolean {
  const probe = spawnSync("python3", ["-c", "import lipsynckit.service"], {
    timeout: 15_000,
  });
  return probe.status === 0;
}

const available = serviceAvailable();
const suite = available ? describe : describe.skip;

suite("against the real study service", () => {
  let child: ChildProcess;
  let logPath: string;

  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "study-ui-"));
    logPath = join(dir, "votes.jsonl");
    const models = ["two-stage", "one-stage", "frame-based"];
    const pool = [];
    for (let i = 0; i < models.length; i += 1) {
      for (let j = i + 1; j < models.length; j += 1) {
        pool.push({
          pair_key: `${models[i]}|${models[j]}`,
          model_a: models[i],
          model_b: models[j],
          media_a: `${models[i]}.mp4`,
          media_b: `${models[j]}.mp4`,
        });
      }
    }
    const poolPath = join(dir, "pool.json");
    writeFileSync(poolPath, JSON.stringify(pool));

    child = spawn(
      "python3",
      [
        "-m", "lipsynckit.cli", "serve",
        "--pool-path", poolPath,
        "--log-path", logPath,
        "--port", String(PORT),
        "--seed", "5",
      ],
      { stdio: "ignore" },
    );

    const deadline = Date.now() + 20_000;
    for (;;) {
      try {
        const response = await fetch(`${BASE}/health`);
        if (response.ok) break;
      } catch {
        // not up yet
      }
      if (Date.now() > deadline) {
        throw new Error("study service did not come up");
      }
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }, 30_000);

  afterAll(() => {
    child?.kill("SIGTERM");
  });

  it("five double-clicked votes produce exactly five log entries", async () => {
    const api = new StudyApi(BASE);
    const session = new SessionController(api, "ui-annotator");
    await session.start();

    for (let vote = 0; vote < 5; vote += 1) {
      const side = vote % 2 ? "right" : "left";
      const results = await Promise.all([session.choose(side), session.choose(side)]);
      expect(results.filter((r) => r === "counted")).toHaveLength(1);
    }
    expect(session.snapshot().completed).toBe(5);

    const lines = readFileSync(logPath, "utf-8").trim().split("\n");
    expect(lines).toHaveLength(5);
    const tokens = lines.map((line) => JSON.parse(line).pair_id as string);
    expect(new Set(tokens).size).toBe(5);
  }, 20_000);

  it("rankings view ordering matches the service's JSON", async () => {
    const api = new StudyApi(BASE);
    const poller = new RankingsPoller(api);
    await poller.refresh();
    const snapshot = poller.snapshot();
    expect(snapshot.stale).toBe(false);

    const response = await fetch(`${BASE}/rankings`);
    const payload = (await response.json()) as {
      models: Array<{ model: string; rating: number }>;
    };
    expect(snapshot.rows.map((r) => r.model)).toEqual(payload.models.map((m) => m.model));
    expect(snapshot.rows.map((r) => r.rating)).toEqual(payload.models.map((m) => m.rating));
    const ratings = snapshot.rows.map((r) => r.rating);
    expect([...ratings].sort((a, b) => b - a)).toEqual(ratings);
  }, 20_000);
});
