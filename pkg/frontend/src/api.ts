/**
 * Thin fetch client for the relay HTTP API. The state endpoint long-polls;
 * 204 means timeout (poll again), 410 means the session ended.
 */

import { SearchHit, UpdateMessage, parseUpdate } from "./protocol.js";

export type StateResult =
  | { status: "update"; update: UpdateMessage }
  | { status: "timeout" }
  | { status: "ended" };

export interface RecordingManifest {
  id: string;
  status: string;
  duration_ms: number;
  updates: number;
  tiles: number;
}

export class RelayClient {
  constructor(private readonly base: string = "") {}

  tileUrl(session: string, sig: string): string {
    return `${this.base}/api/session/${session}/tile/${sig}`;
  }

  async getState(session: string, since: number, waitMs: number): Promise<StateResult> {
    const resp = await fetch(
      `${this.base}/api/session/${session}/state?since=${since}&wait=${waitMs}`,
    );
    if (resp.status === 204) return { status: "timeout" };
    if (resp.status === 410) return { status: "ended" };
    if (!resp.ok) throw new Error(`state: HTTP ${resp.status}`);
    return { status: "update", update: parseUpdate(await resp.json()) };
  }

  async recordingManifest(session: string): Promise<RecordingManifest> {
    const resp = await fetch(`${this.base}/api/session/${session}/recording`);
    if (!resp.ok) throw new Error(`recording: HTTP ${resp.status}`);
    return (await resp.json()) as RecordingManifest;
  }

  /** Floor-seek; null when at_ms precedes the first update. */
  async recordingState(session: string, atMs: number): Promise<UpdateMessage | null> {
    const resp = await fetch(
      `${this.base}/api/session/${session}/recording/state?at=${Math.max(0, Math.round(atMs))}`,
    );
    if (resp.status === 204) return null;
    if (!resp.ok) throw new Error(`recording state: HTTP ${resp.status}`);
    return parseUpdate(await resp.json());
  }

  async search(query: string, limit = 50): Promise<SearchHit[]> {
    const resp = await fetch(
      `${this.base}/api/search?q=${encodeURIComponent(query)}&limit=${limit}`,
    );
    if (!resp.ok) throw new Error(`search: HTTP ${resp.status}`);
    const body = (await resp.json()) as { hits: SearchHit[] };
    return body.hits;
  }
}
