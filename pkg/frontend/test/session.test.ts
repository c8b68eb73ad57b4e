import { describe, expect, it } from "vitest";

import { StudyApi } from "../src/api.js";
import { SessionController } from "../src/session.js";
import { FakeService } from "./fake-service.js";

describe("SessionController", () => {
  it("completes 5 votes with no duplicate log entries under double-click stress", async () => {
    const service = new FakeService(["m0", "m1", "m2"]);
    const session = new SessionController(new StudyApi("", service.fetch), "ann-1");
    await session.start();

    for (let vote = 0; vote < 5; vote += 1) {
      const side = vote % 2 ? "right" : "left";
      // A double click fires chooser twice before any state can settle.
      const results = await Promise.all([session.choose(side), session.choose(side)]);
      expect(results.filter((r) => r === "counted")).toHaveLength(1);
      expect(results.filter((r) => r === "ignored")).toHaveLength(1);
    }

    expect(session.snapshot().completed).toBe(5);
    expect(service.log).toHaveLength(5);
    const tokens = service.log.map((entry) => entry.pair_id);
    expect(new Set(tokens).size).toBe(5);
  });

  it("maps the chosen side through the recorded presentation order", async () => {
    const service = new FakeService(["m0", "m1"]);
    const session = new SessionController(new StudyApi("", service.fetch), "ann-1");
    await session.start();
    for (let i = 0; i < 10; i += 1) {
      const assignment = session.snapshot().assignment!;
      await session.choose("left");
      const entry = service.log[service.log.length - 1]!;
      expect(entry.pair_id).toBe(assignment.pair_id);
      expect(entry.winner).toBe(assignment.left_is_a ? "A" : "B");
    }
  });

  it("absorbs a stale assignment without counting", async () => {
    const service = new FakeService(["m0", "m1"]);
    const api = new StudyApi("", service.fetch);
    const session = new SessionController(api, "ann-1");
    await session.start();
    const stale = session.snapshot().assignment!;
    // Someone votes on the same token out of band; the session's own
    // attempt then collides and must not count it.
    await api.submitVote(stale.pair_id, "left", "ann-1");
    const result = await session.choose("right");
    expect(result).toBe("absorbed");
    expect(session.snapshot().completed).toBe(0);
    expect(service.log).toHaveLength(1);
    expect(session.snapshot().phase).toBe("ready"); // a fresh pair was fetched
  });

  it("ignores choices while no assignment is active", async () => {
    const service = new FakeService(["m0", "m1"]);
    const session = new SessionController(new StudyApi("", service.fetch), "ann-1");
    expect(await session.choose("left")).toBe("ignored");
    expect(service.log).toHaveLength(0);
  });

  it("release fetches a fresh pair and abandons the old token", async () => {
    const service = new FakeService(["m0", "m1"]);
    const session = new SessionController(new StudyApi("", service.fetch), "ann-1");
    await session.start();
    const first = session.snapshot().assignment!;
    await session.release();
    const second = session.snapshot().assignment!;
    expect(second.pair_id).not.toBe(first.pair_id);
    expect(service.log).toHaveLength(0);
  });

  it("reports an error phase when the service is unreachable", async () => {
    const api = new StudyApi("", () => Promise.reject(new TypeError("down")));
    const session = new SessionController(api, "ann-1");
    await session.start();
    expect(session.snapshot().phase).toBe("error");
    expect(session.snapshot().lastError).toContain("down");
  });
});
