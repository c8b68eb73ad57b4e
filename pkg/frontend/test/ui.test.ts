// @vitest-environment happy-dom
import { describe, expect, it, vi } from "vitest";

import { StudyApi } from "../src/api.js";
import { SessionController } from "../src/session.js";
import { renderPair, renderRankings, wireSession } from "../src/ui.js";
import { FakeService } from "./fake-service.js";

function click(element: Element): void {
  element.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function finishPlayback(root: HTMLElement): void {
  for (const side of ["left", "right"]) {
    const video = root.querySelector(`[data-testid=video-${side}]`)!;
    video.dispatchEvent(new Event("ended"));
  }
}

const assignment = {
  pair_id: "t-1",
  media_url_a: "/media/a.mp4",
  media_url_b: "/media/b.mp4",
  left_is_a: true,
  expires_in_s: 1800,
};

describe("renderPair", () => {
  it("keeps choice buttons disabled until both videos played once", () => {
    const root = document.createElement("div");
    const chosen: string[] = [];
    renderPair(root, assignment, "", {
      onChoice: (side) => chosen.push(side),
      onRetry: () => undefined,
    });
    const left = root.querySelector<HTMLButtonElement>("[data-testid=choose-left]")!;
    const right = root.querySelector<HTMLButtonElement>("[data-testid=choose-right]")!;
    expect(left.disabled).toBe(true);
    expect(right.disabled).toBe(true);
    click(left);
    expect(chosen).toHaveLength(0); // disabled buttons do not fire

    root.querySelector("[data-testid=video-left]")!.dispatchEvent(new Event("ended"));
    expect(left.disabled).toBe(true); // one video is not enough
    root.querySelector("[data-testid=video-right]")!.dispatchEvent(new Event("ended"));
    expect(left.disabled).toBe(false);
    expect(right.disabled).toBe(false);

    click(left);
    expect(chosen).toEqual(["left"]);
  });

  it("presents media by recorded side order", () => {
    const root = document.createElement("div");
    renderPair(root, { ...assignment, left_is_a: false }, "", {
      onChoice: () => undefined,
      onRetry: () => undefined,
    });
    const leftVideo = root.querySelector<HTMLVideoElement>("[data-testid=video-left]")!;
    expect(leftVideo.src).toContain("b.mp4"); // model B presented left
  });

  it("shows a retry card when a video fails to load", () => {
    const root = document.createElement("div");
    let retried = 0;
    renderPair(root, assignment, "", {
      onChoice: () => undefined,
      onRetry: () => {
        retried += 1;
      },
    });
    root.querySelector("[data-testid=video-left]")!.dispatchEvent(new Event("error"));
    expect(root.querySelector("[data-testid=media-error]")).not.toBeNull();
    expect(root.querySelector("[data-testid=choose-left]")).toBeNull();
    click(root.querySelector("[data-testid=retry]")!);
    expect(retried).toBe(1);
  });
});

describe("renderRankings", () => {
  const rows = [
    { model: "x", rating: 1016, ci_low: 1000, ci_high: 1030, games: 2 },
    { model: "y", rating: 984, ci_low: 984, ci_high: 984, games: 2 },
  ];

  it("renders rows in order with interval text", () => {
    const root = document.createElement("div");
    renderRankings(root, { rows, stale: false });
    const rendered = [...root.querySelectorAll("[data-testid=rankings-row]")].map(
      (tr) => tr.textContent,
    );
    expect(rendered[0]).toContain("x");
    expect(rendered[0]).toContain("[1000.0, 1030.0]");
    expect(rendered[1]).toContain("y");
    expect(root.querySelector("[data-testid=stale-banner]")).toBeNull();
  });

  it("shows the stale banner when flagged", () => {
    const root = document.createElement("div");
    renderRankings(root, { rows, stale: true });
    expect(root.querySelector("[data-testid=stale-banner]")).not.toBeNull();
  });
});

describe("wired study flow", () => {
  it("completes 5 votes through the DOM with double clicks absorbed", async () => {
    const service = new FakeService(["m0", "m1", "m2"]);
    const session = new SessionController(new StudyApi("", service.fetch), "ann-dom");
    const pairRoot = document.createElement("div");
    const statusRoot = document.createElement("div");
    statusRoot.innerHTML =
      '<span data-testid="completed"></span><span data-testid="phase"></span>';
    wireSession(session, pairRoot, statusRoot, "");
    await session.start();

    for (let vote = 0; vote < 5; vote += 1) {
      await vi.waitFor(() => {
        if (session.snapshot().phase !== "ready") throw new Error("not ready");
      });
      finishPlayback(pairRoot);
      const button = pairRoot.querySelector<HTMLButtonElement>(
        "[data-testid=choose-left]",
      )!;
      expect(button.disabled).toBe(false);
      click(button);
      click(button); // double click: second must be absorbed
      await vi.waitFor(() => {
        if (session.snapshot().completed !== vote + 1) throw new Error("pending");
      });
    }

    expect(service.log).toHaveLength(5);
    expect(new Set(service.log.map((e) => e.pair_id)).size).toBe(5);
    expect(statusRoot.querySelector("[data-testid=completed]")!.textContent).toBe(
      "5 votes submitted",
    );
  });
});
