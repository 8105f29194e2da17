"""Session hosting: one writer per session, concurrent readers, long-poll wake.

Live sessions are held in memory; ending a session flushes it to the storage
root and evicts it, so a restarted server serves recordings but no dead live
sessions. Long-polling viewers block on the session's condition variable and
are woken by ingest (or by session end).
"""

from __future__ import annotations

import logging
import secrets
import string
import threading
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    SequenceError,
    ServerFullError,
    SessionEndedError,
    SessionUnknownError,
    WireValidationError,
)
from ..protocol import TilePos, TileRecord, UpdateMessage, decode_tile, tile_signature
from ..textindex import SearchHit, TextIndex, TextRun
from .store import (
    RecordedSession,
    SessionRecording,
    TileStore,
    scan_recordings,
    write_recording,
)

log = logging.getLogger("tilecast.server")

_ID_ALPHABET = string.ascii_lowercase + string.digits


@dataclass
class LiveSession:
    id: str
    cond: threading.Condition = field(default_factory=threading.Condition)
    status: str = "live"
    updates: list[UpdateMessage] = field(default_factory=list)
    wall_ts: list[int] = field(default_factory=list)
    tile_refs: set[str] = field(default_factory=set)
    wire_bytes: int = 0
    wire_requests: int = 0
    started_wall_ms: int = 0

    @property
    def latest(self) -> UpdateMessage | None:
        return self.updates[-1] if self.updates else None

    @property
    def latest_seq(self) -> int:
        return self.updates[-1].seq if self.updates else 0


class SessionHub:
    """All relay-side state: live sessions, tile store, recordings, text index."""

    def __init__(
        self,
        storage_root: Path | str | None = None,
        max_sessions: int = 64,
        long_poll_cap_ms: int = 30000,
        verify_signatures: bool = False,
    ):
        self._lock = threading.RLock()
        self._live: dict[str, LiveSession] = {}
        self._recorded: dict[str, RecordedSession] = {}
        self._tiles = TileStore()
        self._closed = False
        self.text_index = TextIndex()
        self.storage_root = Path(storage_root) if storage_root is not None else None
        self.max_sessions = max_sessions
        self.long_poll_cap_ms = long_poll_cap_ms
        self.verify_signatures = verify_signatures
        if self.storage_root is not None:
            self._recorded = scan_recordings(self.storage_root)
            for sid in self._recorded:
                tokens = self.storage_root / sid / "tokens.jsonl"
                if tokens.exists():
                    self.text_index.load_session(sid, tokens)
            if self._recorded:
                log.info("loaded %d recorded sessions", len(self._recorded))

    # --- lookup helpers ------------------------------------------------------

    def _live_session(self, session_id: str) -> LiveSession:
        with self._lock:
            session = self._live.get(session_id)
            if session is None:
                if session_id in self._recorded:
                    raise SessionEndedError(f"session {session_id} has ended")
                raise SessionUnknownError(f"unknown session {session_id}")
            return session

    def _any_session(self, session_id: str) -> LiveSession | RecordedSession:
        with self._lock:
            if session_id in self._live:
                return self._live[session_id]
            if session_id in self._recorded:
                return self._recorded[session_id]
        raise SessionUnknownError(f"unknown session {session_id}")

    # --- session lifecycle ---------------------------------------------------

    def create_session(self) -> str:
        with self._lock:
            if self._closed:
                raise ServerFullError("hub is shutting down")
            if len(self._live) >= self.max_sessions:
                raise ServerFullError(f"live session limit {self.max_sessions} reached")
            while True:
                sid = "".join(secrets.choice(_ID_ALPHABET) for _ in range(8))
                if sid in self._live or sid in self._recorded:
                    continue
                if self.storage_root is not None and (self.storage_root / sid).exists():
                    continue
                break
            self._live[sid] = LiveSession(id=sid, started_wall_ms=int(time.time() * 1000))
            log.info("session %s created", sid)
            return sid

    def ingest_update(self, session_id: str, update: UpdateMessage, wire_bytes: int = 0) -> list[str]:
        """Append one update; returns signatures still missing a payload."""
        update.validate()
        session = self._live_session(session_id)
        with session.cond:
            if session.status != "live":
                raise SessionEndedError(f"session {session_id} has ended")
            expected = session.latest_seq + 1
            if update.seq != expected:
                raise SequenceError(expected=expected, got=update.seq)
            session.updates.append(update)
            session.wall_ts.append(int(time.time() * 1000))
            session.wire_bytes += wire_bytes
            session.wire_requests += 1
            for sig in set(update.tile_map.values()):
                if sig not in session.tile_refs:
                    session.tile_refs.add(sig)
                    self._tiles.retain(sig)
            missing = sorted(
                sig for sig in set(update.tile_map.values())
                if not self._tiles.has_payload(sig)
            )
            session.cond.notify_all()
        return missing

    def put_tile(self, session_id: str, record: TileRecord, wire_bytes: int = 0) -> None:
        session = self._live_session(session_id)
        with session.cond:
            if session.status != "live":
                raise SessionEndedError(f"session {session_id} has ended")
            if self.verify_signatures:
                self._verify_signature(session, record)
            if record.signature not in session.tile_refs:
                session.tile_refs.add(record.signature)
                self._tiles.retain(record.signature)
            self._tiles.put(record)
            session.wire_bytes += wire_bytes
            session.wire_requests += 1

    @staticmethod
    def _verify_signature(session: LiveSession, record: TileRecord) -> None:
        latest = session.latest
        if latest is None:
            return
        pos: TilePos | None = None
        for p, sig in latest.tile_map.items():
            if sig == record.signature:
                pos = p
                break
        if pos is None:
            return  # not resolvable against the current map; nothing to check
        pixels = decode_tile(record)
        actual = tile_signature(latest.url, pos, pixels, record.width, record.height)
        if actual != record.signature:
            from ..errors import TileIntegrityError

            raise TileIntegrityError(
                f"declared {record.signature} but pixels hash to {actual}"
            )

    def get_tile(self, session_id: str, sig: str) -> TileRecord:
        entity = self._any_session(session_id)
        if isinstance(entity, LiveSession):
            if sig in entity.tile_refs:
                record = self._tiles.get(sig)
                if record is not None:
                    return record
            raise SessionUnknownError(f"tile {sig} not available in session {session_id}")
        record = entity.tile(sig)
        if record is None:
            raise SessionUnknownError(f"tile {sig} not available in session {session_id}")
        return record

    def get_state(self, session_id: str, since: int, wait_ms: int = 0) -> UpdateMessage | None:
        """Latest update newer than `since`, long-polling up to wait_ms.

        Returns None on timeout (plain polling miss). Raises SessionEndedError
        once the session has ended and no newer update will ever arrive.
        """
        session = self._any_session(session_id)
        if isinstance(session, RecordedSession):
            raise SessionEndedError(f"session {session_id} has ended")
        wait_ms = max(0, min(wait_ms, self.long_poll_cap_ms))
        deadline = time.monotonic() + wait_ms / 1000.0
        with session.cond:
            while True:
                if session.latest_seq > since:
                    return session.latest
                if session.status != "live":
                    raise SessionEndedError(f"session {session_id} has ended")
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return None
                session.cond.wait(remaining)

    def end_session(self, session_id: str) -> dict:
        session = self._live_session(session_id)
        with session.cond:
            if session.status != "live":
                raise SessionEndedError(f"session {session_id} already ended")
            session.status = "ended"
            session.wire_requests += 1
            duration_ms = session.latest.timestamp_ms if session.latest else 0
            session.cond.notify_all()

        tiles = [
            record
            for sig in sorted(session.tile_refs)
            if (record := self._tiles.get(sig)) is not None
        ]
        meta = {
            "id": session_id,
            "status": "ended",
            "duration_ms": duration_ms,
            "updates": len(session.updates),
            "tiles": len(tiles),
            "started_wall_ms": session.started_wall_ms,
            "wire_bytes": session.wire_bytes,
            "wire_requests": session.wire_requests,
        }
        wall_updates = list(zip(session.wall_ts, session.updates))

        if self.storage_root is not None:
            directory = self.storage_root / session_id
            write_recording(directory, meta, wall_updates, tiles, None)
            self.text_index.dump_session(session_id, directory / "tokens.jsonl")
            recorded = RecordedSession.from_dir(directory)
        else:
            recorded = RecordedSession(
                session_id=session_id,
                meta=meta,
                updates=[u for _, u in wall_updates],
                tiles={t.signature: t for t in tiles},
            )

        with self._lock:
            self._recorded[session_id] = recorded
            self._live.pop(session_id, None)
        self._tiles.release_all(session.tile_refs)
        log.info("session %s ended: %d updates, %d tiles", session_id,
                 meta["updates"], meta["tiles"])
        return {"id": session_id, "duration_ms": duration_ms,
                "updates": meta["updates"], "tiles": meta["tiles"]}

    # --- recordings ----------------------------------------------------------

    def _recording_updates(self, session_id: str) -> list[UpdateMessage]:
        entity = self._any_session(session_id)
        if isinstance(entity, LiveSession):
            with entity.cond:
                return list(entity.updates)
        return entity.updates()

    def get_recording(self, session_id: str) -> SessionRecording:
        updates = self._recording_updates(session_id)
        return SessionRecording(
            updates=[(u.timestamp_ms, u) for u in updates],
            duration_ms=updates[-1].timestamp_ms if updates else 0,
        )

    def recording_manifest(self, session_id: str) -> dict:
        entity = self._any_session(session_id)
        if isinstance(entity, RecordedSession):
            return entity.manifest()
        with entity.cond:
            return {
                "id": session_id,
                "status": entity.status,
                "duration_ms": entity.latest.timestamp_ms if entity.latest else 0,
                "updates": len(entity.updates),
                "tiles": self._tiles.payload_count(entity.tile_refs),
            }

    def recording_state(self, session_id: str, at_ms: int) -> UpdateMessage | None:
        """Update with the greatest timestamp <= at_ms; None if before the first."""
        updates = self._recording_updates(session_id)
        if not updates:
            return None
        ts = [u.timestamp_ms for u in updates]
        idx = bisect_right(ts, at_ms) - 1
        if idx < 0:
            return None
        return updates[idx]

    # --- text ---------------------------------------------------------------

    def index_text(self, session_id: str, seq: int, runs: list[TextRun], wire_bytes: int = 0) -> int:
        session = self._live_session(session_id)
        with session.cond:
            if session.status != "live":
                raise SessionEndedError(f"session {session_id} has ended")
            ts_by_seq = {u.seq: u.timestamp_ms for u in session.updates}
            if seq not in ts_by_seq:
                raise WireValidationError(f"seq {seq} not in session recording")
            session.wire_bytes += wire_bytes
            session.wire_requests += 1
            ts_ms = ts_by_seq[seq]
        return self.text_index.index_runs(session_id, seq, ts_ms, runs)

    def search(self, query: str, limit: int = 50) -> list[SearchHit]:
        return self.text_index.search(query, limit)

    # --- misc ----------------------------------------------------------------

    def wire_stats(self, session_id: str) -> dict:
        entity = self._any_session(session_id)
        if isinstance(entity, LiveSession):
            with entity.cond:
                return {"bytes": entity.wire_bytes, "requests": entity.wire_requests}
        return {"bytes": entity.meta.get("wire_bytes", 0),
                "requests": entity.meta.get("wire_requests", 0)}

    def live_sessions(self) -> list[str]:
        with self._lock:
            return sorted(self._live)

    def close(self) -> None:
        """Wake all long-pollers; further session creation is refused."""
        with self._lock:
            self._closed = True
            sessions = list(self._live.values())
        for session in sessions:
            with session.cond:
                session.status = "ended"
                session.cond.notify_all()
