import { describe, expect, it } from "vitest";

import { fitScale, scrollTargetForBBox } from "../src/composite.js";
import { ReplayPlayer } from "../src/player.js";
import { SearchHit, UpdateMessage } from "../src/protocol.js";

function update(overrides: Partial<UpdateMessage> = {}): UpdateMessage {
  return {
    seq: 3, ts_ms: 500, url: "https://x.test/", vw: 400, vh: 300,
    sx: 0, sy: 0, sw: 1000, sh: 2000, cx: 0, cy: 0, cshape: "default",
    tiles: [], new: [], ...overrides,
  };
}

function hit(bbox: [number, number, number, number], ts = 1250): SearchHit {
  return { session: "abcd1234", seq: 5, ts_ms: ts, url: "https://x.test/",
           bbox, snippet: "needle" };
}

describe("replay playhead", () => {
  it("seek clamps to the recording duration", () => {
    const player = new ReplayPlayer(10000);
    expect(player.seek(-100)).toBe(0);
    expect(player.seek(4000)).toBe(4000);
    expect(player.seek(99999)).toBe(10000);
  });

  it("play advances in real time and pauses at the end", () => {
    const player = new ReplayPlayer(1000);
    player.playing = true;
    expect(player.tick(400)).toBe(400);
    expect(player.tick(400)).toBe(800);
    expect(player.tick(400)).toBe(1000);
    expect(player.playing).toBe(false);
  });
});

describe("search hit activation", () => {
  it("seeks the playhead to the hit timestamp", () => {
    const player = new ReplayPlayer(10000);
    const action = player.activateHit(hit([10, 20, 50, 16]), update());
    expect(player.playheadMs).toBe(1250);
    expect(action.playheadMs).toBe(1250);
  });

  it("highlights a visible bbox at bbox minus scroll", () => {
    const player = new ReplayPlayer(10000);
    const u = update({ sx: 100, sy: 700, vw: 400, vh: 300 });
    const action = player.activateHit(hit([150, 750, 80, 20]), u);
    expect(action.scrollTo).toBeNull();
    expect(action.highlight).toEqual({ left: 50, top: 50, width: 80, height: 20 });
  });

  it("scrolls an offscreen bbox into view, clamped to page bounds", () => {
    const player = new ReplayPlayer(10000);
    const u = update({ sx: 0, sy: 0, vw: 400, vh: 300, sw: 1000, sh: 2000 });
    const action = player.activateHit(hit([500, 1800, 100, 20]), u);
    // target centers the bbox: x = 550-200=350, y = 1810-150=1660
    expect(action.scrollTo).toEqual({ x: 350, y: 1660 });
    expect(action.highlight.left).toBe(500 - 350);
    expect(action.highlight.top).toBe(1800 - 1660);

    const corner = player.activateHit(hit([980, 1990, 20, 10]), u);
    expect(corner.scrollTo).toEqual({ x: 600, y: 1700 }); // clamped to max scroll
  });
});

describe("scale to fit", () => {
  it("downscales when the publisher viewport exceeds the screen", () => {
    const u = update({ vw: 1024, vh: 768 });
    expect(fitScale(u, 512, 768)).toBe(0.5);
    expect(fitScale(u, 2000, 2000)).toBe(1);
  });

  it("scroll target for a bbox never leaves the page", () => {
    const u = update();
    const target = scrollTargetForBBox([0, 0, 10, 10], u);
    expect(target).toEqual({ x: 0, y: 0 });
  });
});
