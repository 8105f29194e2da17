/**
 * Replay playhead: real-time advance, clamped seeking, and search-hit
 * activation (seek to the hit's timestamp + a highlight rectangle).
 */

import { highlightRect, Rect, scrollTargetForBBox, bboxVisible } from "./composite.js";
import { Point } from "./interpolate.js";
import { SearchHit, UpdateMessage } from "./protocol.js";

export interface HitActivation {
  playheadMs: number;
  /** scroll needed to bring the bbox into view; null if already visible */
  scrollTo: Point | null;
  /** highlight in screen coordinates for the resulting scroll */
  highlight: Rect;
}

export class ReplayPlayer {
  playheadMs = 0;
  playing = false;

  constructor(readonly durationMs: number) {}

  seek(ms: number): number {
    this.playheadMs = Math.max(0, Math.min(this.durationMs, ms));
    return this.playheadMs;
  }

  /** Advance while playing; pauses at the end of the recording. */
  tick(dtMs: number): number {
    if (this.playing) {
      this.playheadMs = Math.min(this.durationMs, this.playheadMs + dtMs);
      if (this.playheadMs >= this.durationMs) this.playing = false;
    }
    return this.playheadMs;
  }

  /**
   * Activating a hit seeks the playhead to the hit's timestamp and computes
   * where the highlight flash belongs given the update displayed there.
   */
  activateHit(hit: SearchHit, updateAtHit: UpdateMessage): HitActivation {
    const playheadMs = this.seek(hit.ts_ms);
    if (bboxVisible(hit.bbox, updateAtHit)) {
      return {
        playheadMs,
        scrollTo: null,
        highlight: highlightRect(hit.bbox, { x: updateAtHit.sx, y: updateAtHit.sy }),
      };
    }
    const scrollTo = scrollTargetForBBox(hit.bbox, updateAtHit);
    return { playheadMs, scrollTo, highlight: highlightRect(hit.bbox, scrollTo) };
  }
}
