/**
 * DOM wiring. The page structure follows the capture model: an outer DIV
 * clipped to the publisher's viewport holds an inner DIV sized to the
 * scrollable area; tile IMGs sit at (col*256, row*256) on the inner surface;
 * a cursor sprite floats above; scroll and cursor glide between updates.
 *
 * Routes: #/live/{sessionId} and #/replay/{sessionId}.
 */

import { RelayClient } from "./api.js";
import {
  cursorScreenPos,
  fitScale,
  highlightRect,
  tilePlacements,
} from "./composite.js";
import { ViewerModel } from "./model.js";
import { ReplayPlayer } from "./player.js";
import { SearchHit, UpdateMessage, visibleTiles } from "./protocol.js";

const POLL_WAIT_MS = 10000;
const TILE_RETRY_MS = 1500;

const client = new RelayClient("");

interface Surface {
  outer: HTMLDivElement;
  inner: HTMLDivElement;
  cursor: HTMLDivElement;
  highlight: HTMLDivElement;
  images: Map<string, HTMLImageElement>;
}

function buildSurface(root: HTMLElement): Surface {
  root.innerHTML = "";
  const outer = document.createElement("div");
  outer.className = "viewport";
  const inner = document.createElement("div");
  inner.className = "surface";
  const cursor = document.createElement("div");
  cursor.className = "remote-cursor shape-default";
  const highlight = document.createElement("div");
  highlight.className = "hit-highlight hidden";
  outer.append(inner, cursor, highlight);
  root.append(outer);
  return { outer, inner, cursor, highlight, images: new Map() };
}

function sizeSurface(surface: Surface, update: UpdateMessage): void {
  surface.outer.style.width = `${update.vw}px`;
  surface.outer.style.height = `${update.vh}px`;
  surface.inner.style.width = `${update.sw}px`;
  surface.inner.style.height = `${update.sh}px`;
  const scale = fitScale(update, window.innerWidth - 32, window.innerHeight - 120);
  surface.outer.style.transform = `scale(${scale})`;
}

/** Create/update tile IMGs for the update's tile map; drop stale ones. */
function syncTiles(surface: Surface, session: string, update: UpdateMessage): void {
  const wanted = new Set(update.tiles.map((t) => t.sig));
  for (const [sig, img] of surface.images) {
    if (!wanted.has(sig)) {
      img.remove();
      surface.images.delete(sig);
    }
  }
  const visibleFirst = new Set(visibleTiles(update).map((t) => t.sig));
  const placements = tilePlacements(update).sort(
    (a, b) => Number(visibleFirst.has(b.sig)) - Number(visibleFirst.has(a.sig)),
  );
  for (const place of placements) {
    let img = surface.images.get(place.sig);
    if (!img) {
      img = document.createElement("img");
      img.className = "tile loading";
      img.decoding = "async";
      img.onload = () => img!.classList.remove("loading");
      img.onerror = () => {
        // placeholder stays; content addressing makes retry safe
        window.setTimeout(() => {
          img!.src = `${client.tileUrl(session, place.sig)}?retry=${Date.now()}`;
        }, TILE_RETRY_MS);
      };
      img.src = client.tileUrl(session, place.sig);
      surface.images.set(place.sig, img);
      surface.inner.append(img);
    }
    img.style.left = `${place.left}px`;
    img.style.top = `${place.top}px`;
    img.style.width = `${place.width}px`;
    img.style.height = `${place.height}px`;
  }
}

function startRenderLoop(surface: Surface, model: ViewerModel): void {
  const frame = () => {
    const now = performance.now();
    const scroll = model.displayedScroll(now);
    const cursor = model.displayedCursor(now);
    surface.inner.style.transform = `translate(${-scroll.x}px, ${-scroll.y}px)`;
    const screen = cursorScreenPos(cursor, scroll);
    surface.cursor.style.transform = `translate(${screen.x}px, ${screen.y}px)`;
    if (model.applied) {
      surface.cursor.className = `remote-cursor shape-${model.applied.cshape}`;
    }
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

function setStatus(text: string): void {
  const el = document.getElementById("status");
  if (el) el.textContent = text;
}

// --- live mode ---------------------------------------------------------------

async function runLive(root: HTMLElement, session: string): Promise<void> {
  const surface = buildSurface(root);
  const model = new ViewerModel("live");
  startRenderLoop(surface, model);
  setStatus(`live session ${session}`);

  let lastApplyMs = 0;
  let intervalMs = 250;
  for (;;) {
    let result;
    try {
      result = await client.getState(session, model.appliedSeq, POLL_WAIT_MS);
    } catch {
      setStatus("relay unreachable, retrying");
      await new Promise((r) => setTimeout(r, 1000));
      continue;
    }
    if (result.status === "timeout") continue;
    if (result.status === "ended") {
      setStatus("session ended");
      const link = document.createElement("a");
      link.href = `#/replay/${session}`;
      link.textContent = "watch the recording";
      link.onclick = () => window.setTimeout(() => window.location.reload(), 50);
      document.getElementById("status")?.append(" — ", link);
      return;
    }
    const now = performance.now();
    if (lastApplyMs > 0) {
      // measured inter-update interval drives the animation span
      intervalMs = Math.min(2000, Math.max(50, now - lastApplyMs));
    }
    if (model.applyUpdate(result.update, now, intervalMs)) {
      lastApplyMs = now;
      sizeSurface(surface, result.update);
      syncTiles(surface, session, result.update);
    }
  }
}

// --- replay mode -------------------------------------------------------------

async function runReplay(root: HTMLElement, session: string): Promise<void> {
  const manifest = await client.recordingManifest(session);
  const surface = buildSurface(root);
  const model = new ViewerModel("replay");
  const player = new ReplayPlayer(manifest.duration_ms);
  startRenderLoop(surface, model);
  setStatus(`replay ${session} (${(manifest.duration_ms / 1000).toFixed(1)}s, `
    + `${manifest.updates} updates)`);

  const controls = document.getElementById("controls")!;
  controls.classList.remove("hidden");
  const slider = document.getElementById("timeline") as HTMLInputElement;
  const playButton = document.getElementById("play") as HTMLButtonElement;
  const timeLabel = document.getElementById("timecode")!;
  slider.max = String(manifest.duration_ms);

  let fetching = false;
  const showFrame = async (animate: boolean) => {
    if (fetching) return;
    fetching = true;
    try {
      const update = await client.recordingState(session, player.playheadMs);
      if (update && update.seq !== model.appliedSeq) {
        if (animate && model.applied) {
          model.applyUpdate(update, performance.now(), 250);
        } else {
          model.applySeek(update);
        }
        sizeSurface(surface, update);
        syncTiles(surface, session, update);
      }
    } finally {
      fetching = false;
    }
  };

  slider.oninput = () => {
    player.playing = false;
    playButton.textContent = "play";
    player.seek(Number(slider.value));
    void showFrame(false);
    updateLabel();
  };
  playButton.onclick = () => {
    if (player.playheadMs >= player.durationMs) player.seek(0);
    player.playing = !player.playing;
    playButton.textContent = player.playing ? "pause" : "play";
  };

  const updateLabel = () => {
    timeLabel.textContent =
      `${(player.playheadMs / 1000).toFixed(1)} / ${(player.durationMs / 1000).toFixed(1)}s`;
  };
  updateLabel();

  let last = performance.now();
  window.setInterval(() => {
    const now = performance.now();
    if (player.playing) {
      player.tick(now - last);
      slider.value = String(player.playheadMs);
      if (!player.playing) playButton.textContent = "play";
      void showFrame(true);
      updateLabel();
    }
    last = now;
  }, 100);

  wireSearch(session, surface, model, player, slider, updateLabel);
  player.seek(0);
  await showFrame(false);
}

function wireSearch(
  session: string,
  surface: Surface,
  model: ViewerModel,
  player: ReplayPlayer,
  slider: HTMLInputElement,
  updateLabel: () => void,
): void {
  const panel = document.getElementById("search-panel")!;
  panel.classList.remove("hidden");
  const input = document.getElementById("search-input") as HTMLInputElement;
  const results = document.getElementById("search-results")!;

  const runQuery = async () => {
    const hits = await client.search(input.value, 50);
    results.innerHTML = "";
    for (const hit of hits.filter((h) => h.session === session)) {
      const item = document.createElement("li");
      item.textContent = `${(hit.ts_ms / 1000).toFixed(1)}s — ${hit.snippet}`;
      item.onclick = () => void activate(hit);
      results.append(item);
    }
    if (!results.children.length) {
      results.innerHTML = "<li class='empty'>no hits</li>";
    }
  };
  input.onkeydown = (ev) => {
    if (ev.key === "Enter") void runQuery();
  };
  (document.getElementById("search-go") as HTMLButtonElement).onclick = () => void runQuery();

  const activate = async (hit: SearchHit) => {
    const update = await client.recordingState(session, hit.ts_ms);
    if (!update) return;
    const action = player.activateHit(hit, update);
    slider.value = String(action.playheadMs);
    updateLabel();
    model.applySeek(update);
    sizeSurface(surface, update);
    syncTiles(surface, session, update);
    if (action.scrollTo) {
      model.scroll.snap(action.scrollTo);
    }
    const scroll = model.scroll.target();
    const rect = highlightRect(hit.bbox, scroll);
    Object.assign(surface.highlight.style, {
      left: `${rect.left}px`,
      top: `${rect.top}px`,
      width: `${rect.width}px`,
      height: `${rect.height}px`,
    });
    surface.highlight.classList.remove("hidden");
    surface.highlight.classList.add("flash");
    window.setTimeout(() => {
      surface.highlight.classList.add("hidden");
      surface.highlight.classList.remove("flash");
    }, 1600);
  };
}

// --- router -------------------------------------------------------------------

function route(): void {
  const root = document.getElementById("app")!;
  const match = window.location.hash.match(/^#\/(live|replay)\/([a-z0-9]{8})$/);
  if (!match) {
    root.innerHTML = `
      <form id="join">
        <input id="sid" placeholder="session id" maxlength="8" autofocus>
        <button data-mode="live">watch live</button>
        <button data-mode="replay">open recording</button>
      </form>`;
    root.querySelectorAll("button").forEach((button) => {
      button.onclick = (ev) => {
        ev.preventDefault();
        const sid = (document.getElementById("sid") as HTMLInputElement).value.trim();
        if (sid) window.location.hash = `#/${button.dataset.mode}/${sid}`;
      };
    });
    return;
  }
  const [, mode, session] = match;
  const run = mode === "live" ? runLive : runReplay;
  run(root, session).catch((err) => setStatus(`error: ${err.message ?? err}`));
}

window.addEventListener("hashchange", () => window.location.reload());
route();
