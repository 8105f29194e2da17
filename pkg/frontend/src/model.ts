/**
 * Viewer state: the monotonic update stream and the animated scroll/cursor.
 * Stale poll responses (seq <= last applied) are dropped; tile placement
 * changes apply immediately while scroll and cursor glide.
 */

import { Animated, Point } from "./interpolate.js";
import { UpdateMessage } from "./protocol.js";

export type ViewerMode = "live" | "replay";

export class ViewerModel {
  readonly mode: ViewerMode;
  applied: UpdateMessage | null = null;
  scroll: Animated = new Animated({ x: 0, y: 0 });
  cursor: Animated = new Animated({ x: 0, y: 0 });
  /** signatures with a successfully loaded image; immutable by content addressing */
  readonly tileCache: Set<string> = new Set();

  constructor(mode: ViewerMode) {
    this.mode = mode;
  }

  get appliedSeq(): number {
    return this.applied ? this.applied.seq : 0;
  }

  /**
   * Apply one update; returns false for stale or duplicate responses.
   * The first update snaps into place, later ones animate over intervalMs.
   */
  applyUpdate(update: UpdateMessage, nowMs: number, intervalMs: number): boolean {
    if (update.seq <= this.appliedSeq) {
      return false;
    }
    const first = this.applied === null;
    this.applied = update;
    const scrollTarget = { x: update.sx, y: update.sy };
    const cursorTarget = { x: update.cx, y: update.cy };
    if (first) {
      this.scroll.snap(scrollTarget);
      this.cursor.snap(cursorTarget);
    } else {
      this.scroll.retarget(scrollTarget, nowMs, intervalMs);
      this.cursor.retarget(cursorTarget, nowMs, intervalMs);
    }
    return true;
  }

  /** Jump without animation (replay seek). */
  applySeek(update: UpdateMessage): void {
    this.applied = update;
    this.scroll.snap({ x: update.sx, y: update.sy });
    this.cursor.snap({ x: update.cx, y: update.cy });
  }

  displayedScroll(nowMs: number): Point {
    return this.scroll.at(nowMs);
  }

  displayedCursor(nowMs: number): Point {
    return this.cursor.at(nowMs);
  }
}
