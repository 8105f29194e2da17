/**
 * Linear interpolation of scroll and cursor between updates. Updates arrive
 * at the capture rate; the viewer animates from whatever is currently
 * displayed toward the newest target over the inter-update interval, so
 * motion stays smooth even though data is discrete.
 */

export interface Point {
  x: number;
  y: number;
}

export function lerp(a: number, b: number, f: number): number {
  return a + (b - a) * f;
}

function clamp01(f: number): number {
  return f < 0 ? 0 : f > 1 ? 1 : f;
}

/**
 * One animated 2-D value. Retargeting captures the currently displayed
 * position as the new segment start, so displayed values always lie on the
 * segment between the previous displayed value and the target.
 */
export class Animated {
  private from: Point;
  private to: Point;
  private startMs = 0;
  private endMs = 0;

  constructor(initial: Point) {
    this.from = { ...initial };
    this.to = { ...initial };
  }

  retarget(target: Point, nowMs: number, durationMs: number): void {
    this.from = this.at(nowMs);
    this.to = { ...target };
    this.startMs = nowMs;
    this.endMs = nowMs + Math.max(0, durationMs);
  }

  /** Jump immediately (seek, first update). */
  snap(target: Point): void {
    this.from = { ...target };
    this.to = { ...target };
    this.startMs = this.endMs = 0;
  }

  at(nowMs: number): Point {
    const span = this.endMs - this.startMs;
    const f = span <= 0 ? 1 : clamp01((nowMs - this.startMs) / span);
    return { x: lerp(this.from.x, this.to.x, f), y: lerp(this.from.y, this.to.y, f) };
  }

  target(): Point {
    return { ...this.to };
  }
}
