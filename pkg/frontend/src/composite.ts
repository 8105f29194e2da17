/**
 * Placement math for reconstructing the page: an outer clipping region of
 * the viewport size holds an inner surface of the scrollable size, offset by
 * (-scrollX, -scrollY); every tile image sits at (col*256, row*256) on the
 * inner surface; the cursor sprite overlays at cursor minus scroll.
 *
 * composeVisibleRGBA mirrors the DOM layout into a raw pixel buffer so tests
 * can assert byte-level fidelity without a browser.
 */

import { Point } from "./interpolate.js";
import { TILE_SIZE, UpdateMessage, tileSize, visibleTiles } from "./protocol.js";

export interface TilePlacement {
  sig: string;
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Every tile's position on the inner surface (document coordinates). */
export function tilePlacements(update: UpdateMessage): TilePlacement[] {
  return update.tiles.map((t) => {
    const { width, height } = tileSize(update.sw, update.sh, t.c, t.r);
    return { sig: t.sig, left: t.c * TILE_SIZE, top: t.r * TILE_SIZE, width, height };
  });
}

/** Cursor position in screen (outer region) coordinates. */
export function cursorScreenPos(cursor: Point, scroll: Point): Point {
  return { x: cursor.x - scroll.x, y: cursor.y - scroll.y };
}

/** A search hit's bbox translated into screen coordinates. */
export function highlightRect(
  bbox: [number, number, number, number], scroll: Point,
): Rect {
  return { left: bbox[0] - scroll.x, top: bbox[1] - scroll.y, width: bbox[2], height: bbox[3] };
}

/**
 * Scroll target that centers a bbox in the viewport, clamped to the page.
 * Used when an activated search hit sits outside the visible region.
 */
export function scrollTargetForBBox(
  bbox: [number, number, number, number], update: UpdateMessage,
): Point {
  const clamp = (v: number, max: number) => Math.max(0, Math.min(v, max));
  const cx = bbox[0] + bbox[2] / 2;
  const cy = bbox[1] + bbox[3] / 2;
  return {
    x: clamp(Math.round(cx - update.vw / 2), Math.max(0, update.sw - update.vw)),
    y: clamp(Math.round(cy - update.vh / 2), Math.max(0, update.sh - update.vh)),
  };
}

export function bboxVisible(
  bbox: [number, number, number, number], update: UpdateMessage,
): boolean {
  const [x, y, w, h] = bbox;
  return (
    x >= update.sx && y >= update.sy &&
    x + w <= update.sx + update.vw && y + h <= update.sy + update.vh
  );
}

/** Scale factor that fits the publisher viewport on the viewer screen. */
export function fitScale(update: UpdateMessage, screenW: number, screenH: number): number {
  return Math.min(1, screenW / update.vw, screenH / update.vh);
}

export interface RgbaImage {
  width: number;
  height: number;
  data: Uint8Array; // RGBA row-major
}

/**
 * Composite the visible region from decoded tiles, exactly as the DOM
 * placement displays it. Missing tiles stay transparent (the placeholder).
 */
export function composeVisibleRGBA(
  update: UpdateMessage, tiles: Map<string, RgbaImage>,
): RgbaImage {
  const width = Math.min(update.vw, update.sw - update.sx);
  const height = Math.min(update.vh, update.sh - update.sy);
  const out = new Uint8Array(width * height * 4);
  for (const ref of visibleTiles(update)) {
    const tile = tiles.get(ref.sig);
    if (!tile) continue;
    const tileLeft = ref.c * TILE_SIZE;
    const tileTop = ref.r * TILE_SIZE;
    const x0 = Math.max(tileLeft, update.sx);
    const y0 = Math.max(tileTop, update.sy);
    const x1 = Math.min(tileLeft + tile.width, update.sx + width);
    const y1 = Math.min(tileTop + tile.height, update.sy + height);
    for (let y = y0; y < y1; y++) {
      const srcOff = ((y - tileTop) * tile.width + (x0 - tileLeft)) * 4;
      const dstOff = ((y - update.sy) * width + (x0 - update.sx)) * 4;
      out.set(tile.data.subarray(srcOff, srcOff + (x1 - x0) * 4), dstOff);
    }
  }
  return { width, height, data: out };
}
