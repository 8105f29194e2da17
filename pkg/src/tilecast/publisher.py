"""Scriptable publisher: tile diffing, dedup, and the capture/upload loop.

Replaces the browser plugin with a deterministic client. Each tick hashes the
full document grid, sends one update message (metadata travels even when no
tile changed), and uploads payloads only for viewport-intersecting tiles the
relay has not acknowledged yet. Periodic reference captures re-send every
visible tile as a defense against lost payloads.
"""

from __future__ import annotations

import gzip
import json
import logging
import time
from dataclasses import dataclass, field

from .document import PageDocument, apply_mutation
from .errors import CaptureError, SequenceError, TransportError
from .privacy import PrivacyPolicy, apply_privacy_filter
from .protocol import (
    PNG,
    CodecPolicy,
    CursorState,
    TileRecord,
    UpdateMessage,
    ViewportState,
    encode_tile,
    serialize_update,
    tile_rect,
    tiles_intersecting_viewport,
)
from .script import (
    CursorEvent,
    MutateEvent,
    NavigateEvent,
    ScrollEvent,
    SessionScript,
    validate_script,
)
from .textindex import TextRun

log = logging.getLogger("tilecast.publisher")


class SentSet:
    """Signatures whose payload upload has been acknowledged this session."""

    def __init__(self):
        self._sigs: set[str] = set()

    def __contains__(self, sig: str) -> bool:
        return sig in self._sigs

    def __len__(self) -> int:
        return len(self._sigs)

    def add(self, sig: str) -> None:
        self._sigs.add(sig)

    def signatures(self) -> frozenset[str]:
        return frozenset(self._sigs)


def _capture(
    doc: PageDocument,
    viewport: ViewportState,
    cursor: CursorState,
    sent: SentSet,
    seq: int,
    ts_ms: int,
    codec: CodecPolicy,
    force: bool,
) -> tuple[UpdateMessage, list[TileRecord]]:
    if (viewport.scrollable_width, viewport.scrollable_height) != (doc.width, doc.height):
        raise CaptureError(
            f"viewport declares {viewport.scrollable_width}x{viewport.scrollable_height} "
            f"but document is {doc.width}x{doc.height}"
        )
    tile_map = doc.tile_signatures()
    records: list[TileRecord] = []
    for pos in tiles_intersecting_viewport(viewport):
        sig = tile_map[pos]
        if force or sig not in sent:
            rect = tile_rect(doc.width, doc.height, pos)
            pixels = doc.raster.crop(rect.x, rect.y, rect.width, rect.height)
            records.append(
                encode_tile(pixels, rect.width, rect.height, codec, url=doc.url, pos=pos)
            )
    update = UpdateMessage(
        seq=seq,
        timestamp_ms=ts_ms,
        url=doc.url,
        viewport=viewport,
        cursor=cursor,
        tile_map=dict(tile_map),
        new_tiles=[r.signature for r in records],
    )
    return update, records


def capture_tick(
    doc: PageDocument,
    viewport: ViewportState,
    cursor: CursorState,
    sent: SentSet,
    seq: int,
    ts_ms: int,
    codec: CodecPolicy = PNG,
) -> tuple[UpdateMessage, list[TileRecord]]:
    """One capture tick: heartbeat update plus payloads for unsent visible tiles."""
    return _capture(doc, viewport, cursor, sent, seq, ts_ms, codec, force=False)


def reference_capture(
    doc: PageDocument,
    viewport: ViewportState,
    cursor: CursorState,
    sent: SentSet,
    seq: int,
    ts_ms: int,
    codec: CodecPolicy = PNG,
) -> tuple[UpdateMessage, list[TileRecord]]:
    """Re-encode and re-send every viewport-intersecting tile regardless of SentSet."""
    return _capture(doc, viewport, cursor, sent, seq, ts_ms, codec, force=True)


# --- wire helpers ------------------------------------------------------------


def encode_update_body(update: UpdateMessage, use_gzip: bool = True) -> tuple[bytes, str | None]:
    """(body bytes, content-encoding) for an update POST."""
    raw = serialize_update(update)
    if use_gzip:
        return gzip.compress(raw, 6, mtime=0), "gzip"
    return raw, None


def encode_text_body(seq: int, runs: list[TextRun]) -> bytes:
    body = {
        "seq": seq,
        "runs": [
            {"text": r.text, "x": r.x, "y": r.y, "w": r.w, "h": r.h, "url": r.url}
            for r in runs
        ],
    }
    return json.dumps(body, separators=(",", ":")).encode("utf-8")


# --- transports ---------------------------------------------------------------


class DirectRelay:
    """In-process transport over a SessionHub; byte accounting mirrors HTTP."""

    def __init__(self, hub):
        self.hub = hub
        self.requests = 0
        self.bytes_up = 0

    def create_session(self) -> str:
        self.requests += 1
        return self.hub.create_session()

    def post_update(self, session_id: str, update: UpdateMessage, body: bytes) -> list[str]:
        self.requests += 1
        self.bytes_up += len(body)
        return self.hub.ingest_update(session_id, update, wire_bytes=len(body))

    def put_tile(self, session_id: str, record: TileRecord) -> None:
        self.requests += 1
        self.bytes_up += len(record.data)
        self.hub.put_tile(session_id, record, wire_bytes=len(record.data))

    def post_text(self, session_id: str, seq: int, runs: list[TextRun]) -> int:
        body = encode_text_body(seq, runs)
        self.requests += 1
        self.bytes_up += len(body)
        return self.hub.index_text(session_id, seq, runs, wire_bytes=len(body))

    def end_session(self, session_id: str) -> dict:
        self.requests += 1
        return self.hub.end_session(session_id)


class HttpRelay:
    """Transport over the relay's HTTP API (requests with keep-alive)."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        import requests

        self.base = base_url.rstrip("/")
        self.timeout = timeout
        self._http = requests.Session()
        self.requests = 0
        self.bytes_up = 0

    def _url(self, path: str) -> str:
        return f"{self.base}{path}"

    def _check(self, resp) -> None:
        if resp.status_code == 404:
            from .errors import SessionUnknownError

            raise SessionUnknownError(resp.text)
        if resp.status_code == 409:
            body = {}
            try:
                body = resp.json()
            except ValueError:
                pass
            if "expected" in body:
                raise SequenceError(expected=body["expected"], got=body.get("got", -1))
            from .errors import TileIntegrityError

            raise TileIntegrityError(resp.text)
        if resp.status_code >= 400:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")

    def create_session(self) -> str:
        import requests as _requests

        try:
            self.requests += 1
            resp = self._http.post(self._url("/api/session"), timeout=self.timeout)
        except _requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._check(resp)
        return resp.json()["id"]

    def post_update(self, session_id: str, update: UpdateMessage, body: bytes) -> list[str]:
        import requests as _requests

        headers = {"Content-Type": "application/json"}
        if body[:2] == b"\x1f\x8b":
            headers["Content-Encoding"] = "gzip"
        try:
            self.requests += 1
            self.bytes_up += len(body)
            resp = self._http.post(
                self._url(f"/api/session/{session_id}/update"),
                data=body, headers=headers, timeout=self.timeout,
            )
        except _requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._check(resp)
        return resp.json()["missing"]

    def put_tile(self, session_id: str, record: TileRecord) -> None:
        import requests as _requests

        content_type = "image/png" if record.codec == "png" else "image/jpeg"
        try:
            self.requests += 1
            self.bytes_up += len(record.data)
            resp = self._http.put(
                self._url(f"/api/session/{session_id}/tile/{record.signature}"),
                data=record.data,
                headers={"Content-Type": content_type},
                timeout=self.timeout,
            )
        except _requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._check(resp)

    def post_text(self, session_id: str, seq: int, runs: list[TextRun]) -> int:
        import requests as _requests

        body = encode_text_body(seq, runs)
        try:
            self.requests += 1
            self.bytes_up += len(body)
            resp = self._http.post(
                self._url(f"/api/session/{session_id}/text"),
                data=body,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout,
            )
        except _requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._check(resp)
        return resp.json()["indexed"]

    def end_session(self, session_id: str) -> dict:
        import requests as _requests

        try:
            self.requests += 1
            resp = self._http.post(
                self._url(f"/api/session/{session_id}/end"), timeout=self.timeout
            )
        except _requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self._check(resp)
        return resp.json()


# --- session loop -------------------------------------------------------------


@dataclass
class PublisherConfig:
    tick_hz: float = 4.0
    ref_interval_s: float = 5.0  # 0 disables reference captures
    codec: CodecPolicy = PNG
    privacy: PrivacyPolicy = field(default_factory=PrivacyPolicy.all)
    viewport_width: int = 1024
    viewport_height: int = 768
    pace: str = "realtime"  # "realtime" | "fast"
    gzip_updates: bool = True
    retry_attempts: int = 5
    retry_base_s: float = 0.2


@dataclass
class TickLog:
    seq: int
    ts_ms: int
    reference: bool
    update_bytes: int
    upload_bytes: int
    uploads: list[str]
    requests: int
    text_runs: int


@dataclass
class SessionStats:
    session_id: str
    ticks: int
    tiles_uploaded: int
    bytes_up: int
    requests: int
    duration_s: float
    tick_log: list[TickLog] = field(default_factory=list)


@dataclass
class TickState:
    """Document and scroll position at one tick of a script walk."""

    index: int
    t_ms: int
    doc: PageDocument
    scroll_x: int
    scroll_y: int
    navigated: bool


def iter_script_ticks(script: SessionScript, documents: dict[str, PageDocument],
                      tick_hz: float):
    """Walk the script at tick resolution, applying navigate/scroll/mutate."""
    tick_ms = 1000.0 / tick_hz
    end_ms = script.duration_ms
    events = script.events
    event_idx = 0
    doc: PageDocument | None = None
    scroll_x = scroll_y = 0
    i = 0
    while (t := round(i * tick_ms)) < end_ms:
        navigated = False
        while event_idx < len(events) and events[event_idx].t_ms <= t:
            e = events[event_idx]
            if isinstance(e, NavigateEvent):
                doc = documents[e.doc_id]
                scroll_x = scroll_y = 0
                navigated = True
            elif isinstance(e, ScrollEvent):
                scroll_x, scroll_y = e.x, e.y
            elif isinstance(e, MutateEvent):
                doc = apply_mutation(doc, e.x, e.y, e.patch)
            event_idx += 1
        assert doc is not None  # scripts start with navigate at t=0
        yield TickState(index=i, t_ms=t, doc=doc, scroll_x=scroll_x,
                        scroll_y=scroll_y, navigated=navigated)
        i += 1


def _cursor_at(keyframes: list[CursorEvent], t_ms: int) -> CursorState:
    """Cursor state at t: linear interpolation between keyframes, clamped ends."""
    if not keyframes:
        return CursorState()
    if t_ms <= keyframes[0].t_ms:
        k = keyframes[0]
        return CursorState(k.x, k.y, k.shape)
    for a, b in zip(keyframes, keyframes[1:]):
        if t_ms <= b.t_ms:
            span = b.t_ms - a.t_ms
            f = 1.0 if span == 0 else (t_ms - a.t_ms) / span
            return CursorState(
                round(a.x + (b.x - a.x) * f),
                round(a.y + (b.y - a.y) * f),
                b.shape if f >= 1.0 else a.shape,
            )
    k = keyframes[-1]
    return CursorState(k.x, k.y, k.shape)


def _with_retry(fn, config: PublisherConfig):
    delay = config.retry_base_s
    for attempt in range(config.retry_attempts):
        try:
            return fn()
        except TransportError:
            if attempt == config.retry_attempts - 1:
                raise
            log.warning("relay unreachable, retrying in %.1fs", delay)
            time.sleep(delay)
            delay = min(delay * 2, 2.0)


def run_session(
    script: SessionScript,
    documents: dict[str, PageDocument],
    transport,
    config: PublisherConfig | None = None,
) -> SessionStats:
    """Drive a full session: tick loop, dedup uploads, text publish, end."""
    config = config or PublisherConfig()
    validate_script(script, documents, config.viewport_width, config.viewport_height)

    tick_ms = 1000.0 / config.tick_hz
    end_ms = script.duration_ms
    ref_every = round(config.ref_interval_s * config.tick_hz) if config.ref_interval_s > 0 else 0
    keyframes = script.cursor_keyframes()

    session_id = _with_retry(transport.create_session, config)
    log.info("session %s starting (%.1f Hz, %s ms script)", session_id,
             config.tick_hz, end_ms)

    sent = SentSet()
    stats = SessionStats(
        session_id=session_id, ticks=0, tiles_uploaded=0, bytes_up=0,
        requests=0, duration_s=end_ms / 1000.0,
    )
    start_wall = time.monotonic()

    for state in iter_script_ticks(script, documents, config.tick_hz):
        i, t, doc = state.index, state.t_ms, state.doc
        navigated = state.navigated
        seq = i + 1
        viewport = ViewportState(
            viewport_width=config.viewport_width,
            viewport_height=config.viewport_height,
            scroll_x=state.scroll_x,
            scroll_y=state.scroll_y,
            scrollable_width=doc.width,
            scrollable_height=doc.height,
        )
        cursor = _cursor_at(keyframes, t)
        is_ref = ref_every > 0 and i > 0 and i % ref_every == 0
        capture = reference_capture if is_ref else capture_tick
        update, records = capture(doc, viewport, cursor, sent, seq, t, config.codec)

        body, _enc = encode_update_body(update, config.gzip_updates)
        requests_before = transport.requests

        def _post(sid=session_id, u=update, b=body):
            try:
                return transport.post_update(sid, u, b)
            except SequenceError as exc:
                if exc.expected == u.seq + 1:
                    return []  # already applied by an earlier attempt
                raise

        missing = _with_retry(_post, config)

        # Recover server-side losses: re-encode acked signatures the relay
        # reports missing, if they still exist in the current tile map.
        uploads = {r.signature: r for r in records}
        if missing:
            sig_to_pos = {sig: pos for pos, sig in update.tile_map.items()}
            for sig in missing:
                if sig in sent and sig not in uploads and sig in sig_to_pos:
                    pos = sig_to_pos[sig]
                    rect = tile_rect(doc.width, doc.height, pos)
                    pixels = doc.raster.crop(rect.x, rect.y, rect.width, rect.height)
                    uploads[sig] = encode_tile(
                        pixels, rect.width, rect.height, config.codec, url=doc.url, pos=pos
                    )

        upload_bytes = 0
        uploaded: list[str] = []
        for sig, record in uploads.items():
            try:
                transport.put_tile(session_id, record)
            except TransportError as exc:
                log.warning("tile %s upload failed (%s); will retry next tick", sig, exc)
                continue
            sent.add(sig)
            uploaded.append(sig)
            upload_bytes += len(record.data)

        text_count = 0
        if navigated and doc.text_runs:
            filtered = apply_privacy_filter(
                [TextRun(text=r.text, x=r.x, y=r.y, w=r.w, h=r.h, url=doc.url, seq=seq)
                 for r in doc.text_runs],
                config.privacy,
            )
            if filtered:
                text_count = _with_retry(
                    lambda sid=session_id, s=seq, runs=filtered: transport.post_text(sid, s, runs),
                    config,
                )

        stats.ticks += 1
        stats.tiles_uploaded += len(uploaded)
        stats.tick_log.append(
            TickLog(
                seq=seq, ts_ms=t, reference=is_ref,
                update_bytes=len(body), upload_bytes=upload_bytes,
                uploads=uploaded, requests=transport.requests - requests_before,
                text_runs=text_count,
            )
        )

        if config.pace == "realtime":
            next_wall = start_wall + (t + tick_ms) / 1000.0
            delay = next_wall - time.monotonic()
            if delay > 0:
                time.sleep(delay)

    _with_retry(lambda: transport.end_session(session_id), config)
    stats.bytes_up = transport.bytes_up
    stats.requests = transport.requests
    return stats
