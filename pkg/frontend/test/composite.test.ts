/**
 * Fidelity: composite the fixture update from its PNG tile payloads (the
 * actual wire artifacts written by the publisher) and compare every pixel
 * against the publisher's own raster crop.
 */

import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { PNG } from "pngjs";
import { describe, expect, it } from "vitest";

import { RgbaImage, composeVisibleRGBA, cursorScreenPos } from "../src/composite.js";
import { parseUpdate, visibleTiles } from "../src/protocol.js";

const FIXTURES = join(__dirname, "fixtures");

function loadPng(path: string): RgbaImage {
  const png = PNG.sync.read(readFileSync(path));
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

function loadFixture() {
  const update = parseUpdate(JSON.parse(readFileSync(join(FIXTURES, "update.json"), "utf-8")));
  const tiles = new Map<string, RgbaImage>();
  for (const name of readdirSync(join(FIXTURES, "tiles"))) {
    tiles.set(name.replace(/\.png$/, ""), loadPng(join(FIXTURES, "tiles", name)));
  }
  return { update, tiles };
}

describe("visible-region compositing", () => {
  it("is pixel-identical to the publisher raster crop", () => {
    const { update, tiles } = loadFixture();
    const expected = loadPng(join(FIXTURES, "expected_visible.png"));
    const composed = composeVisibleRGBA(update, tiles);
    expect(composed.width).toBe(expected.width);
    expect(composed.height).toBe(expected.height);
    expect(Buffer.from(composed.data).equals(Buffer.from(expected.data))).toBe(true);
  });

  it("covers the viewport with exactly the payloads the publisher sent", () => {
    const { update, tiles } = loadFixture();
    const visible = visibleTiles(update);
    expect(visible.length).toBe(tiles.size);
    for (const ref of visible) {
      expect(tiles.has(ref.sig)).toBe(true);
    }
    expect(new Set(update.new)).toEqual(new Set(tiles.keys()));
  });

  it("leaves a transparent placeholder where a tile is missing", () => {
    const { update, tiles } = loadFixture();
    const firstVisible = visibleTiles(update)[0];
    tiles.delete(firstVisible.sig);
    const composed = composeVisibleRGBA(update, tiles);
    // top-left pixel belongs to the dropped tile at this scroll position
    expect(composed.data[3]).toBe(0);
    // but pixels from other tiles are still drawn
    const lastByte = composed.data[composed.data.length - 1];
    expect(lastByte).toBe(255);
  });

  it("translates the cursor into screen coordinates", () => {
    const { update } = loadFixture();
    const screen = cursorScreenPos({ x: update.cx, y: update.cy },
                                   { x: update.sx, y: update.sy });
    expect(screen).toEqual({ x: update.cx - update.sx, y: update.cy - update.sy });
  });
});
