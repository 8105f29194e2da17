/**
 * Wire types shared with the relay, plus the tile grid math the viewer
 * needs to place and prioritize tiles. Mirrors the relay's update schema:
 * unknown fields are ignored, unknown cursor shapes map to "default".
 */

export const TILE_SIZE = 256;

export type CursorShape = "default" | "pointer" | "text" | "wait" | "move" | "crosshair";

const CURSOR_SHAPES: ReadonlySet<string> = new Set([
  "default", "pointer", "text", "wait", "move", "crosshair",
]);

export interface TileRef {
  c: number;
  r: number;
  sig: string;
}

export interface UpdateMessage {
  seq: number;
  ts_ms: number;
  url: string;
  vw: number;
  vh: number;
  sx: number;
  sy: number;
  sw: number;
  sh: number;
  cx: number;
  cy: number;
  cshape: CursorShape;
  tiles: TileRef[];
  new: string[];
}

export interface SearchHit {
  session: string;
  seq: number;
  ts_ms: number;
  url: string;
  bbox: [number, number, number, number];
  snippet: string;
}

function requireNumber(obj: Record<string, unknown>, key: string): number {
  const value = obj[key];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new Error(`update message field ${key} missing or not a number`);
  }
  return value;
}

/** Parse and lightly validate a state-endpoint response body. */
export function parseUpdate(raw: unknown): UpdateMessage {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("update message must be an object");
  }
  const obj = raw as Record<string, unknown>;
  const tilesRaw = obj.tiles;
  if (!Array.isArray(tilesRaw)) {
    throw new Error("update message field tiles missing or not a list");
  }
  const tiles: TileRef[] = tilesRaw.map((t) => {
    const entry = t as Record<string, unknown>;
    return {
      c: requireNumber(entry, "c"),
      r: requireNumber(entry, "r"),
      sig: String(entry.sig),
    };
  });
  const shapeRaw = typeof obj.cshape === "string" ? obj.cshape : "default";
  return {
    seq: requireNumber(obj, "seq"),
    ts_ms: requireNumber(obj, "ts_ms"),
    url: String(obj.url ?? ""),
    vw: requireNumber(obj, "vw"),
    vh: requireNumber(obj, "vh"),
    sx: requireNumber(obj, "sx"),
    sy: requireNumber(obj, "sy"),
    sw: requireNumber(obj, "sw"),
    sh: requireNumber(obj, "sh"),
    cx: requireNumber(obj, "cx"),
    cy: requireNumber(obj, "cy"),
    cshape: (CURSOR_SHAPES.has(shapeRaw) ? shapeRaw : "default") as CursorShape,
    tiles,
    new: Array.isArray(obj.new) ? obj.new.map(String) : [],
  };
}

export function gridDims(sw: number, sh: number): { cols: number; rows: number } {
  return { cols: Math.ceil(sw / TILE_SIZE), rows: Math.ceil(sh / TILE_SIZE) };
}

/** Pixel size of the tile at (c, r); edge tiles are cropped to the page. */
export function tileSize(
  sw: number, sh: number, c: number, r: number,
): { width: number; height: number } {
  return {
    width: Math.min(TILE_SIZE, sw - c * TILE_SIZE),
    height: Math.min(TILE_SIZE, sh - r * TILE_SIZE),
  };
}

/** Tile refs whose rect intersects the scroll window, row-major. */
export function visibleTiles(update: UpdateMessage): TileRef[] {
  const { cols, rows } = gridDims(update.sw, update.sh);
  const x1 = Math.min(update.sx + update.vw, update.sw);
  const y1 = Math.min(update.sy + update.vh, update.sh);
  if (x1 <= update.sx || y1 <= update.sy) return [];
  const c0 = Math.floor(update.sx / TILE_SIZE);
  const c1 = Math.min(Math.floor((x1 - 1) / TILE_SIZE), cols - 1);
  const r0 = Math.floor(update.sy / TILE_SIZE);
  const r1 = Math.min(Math.floor((y1 - 1) / TILE_SIZE), rows - 1);
  const bySig = new Map(update.tiles.map((t) => [`${t.c},${t.r}`, t]));
  const out: TileRef[] = [];
  for (let r = r0; r <= r1; r++) {
    for (let c = c0; c <= c1; c++) {
      const ref = bySig.get(`${c},${r}`);
      if (ref) out.push(ref);
    }
  }
  return out;
}
