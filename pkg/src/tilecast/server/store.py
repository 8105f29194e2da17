"""Content-addressed tile storage and recording persistence.

Tiles live in one store shared across sessions but are only resolvable
through sessions that reference them. A finished session is flushed to a
directory: updates.jsonl (wall timestamp prefix + one update per line),
tiles/<signature>.<ext>, tokens.jsonl, and meta.json.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import TileIntegrityError
from ..protocol import TileRecord, UpdateMessage, deserialize_update, serialize_update

_EXT = {"png": ".png", "jpeg": ".jpg"}
_CODEC_BY_EXT = {".png": "png", ".jpg": "jpeg", ".jpeg": "jpeg"}


@dataclass
class SessionRecording:
    """Ordered update log of one session."""

    updates: list[tuple[int, UpdateMessage]]  # (timestamp_ms, update)
    duration_ms: int


class TileStore:
    """Signature -> TileRecord map with per-session reference counting.

    put is idempotent for identical bytes and rejects differing bytes for the
    same signature. Entries are dropped once no session references them.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._records: dict[str, TileRecord | None] = {}
        self._refs: dict[str, int] = {}

    def retain(self, sig: str) -> None:
        with self._lock:
            self._refs[sig] = self._refs.get(sig, 0) + 1
            self._records.setdefault(sig, None)

    def release_all(self, sigs) -> None:
        with self._lock:
            for sig in sigs:
                count = self._refs.get(sig, 0) - 1
                if count <= 0:
                    self._refs.pop(sig, None)
                    self._records.pop(sig, None)
                else:
                    self._refs[sig] = count

    def put(self, record: TileRecord) -> bool:
        """Store a payload; returns False for an identical duplicate."""
        with self._lock:
            existing = self._records.get(record.signature)
            if existing is not None:
                if existing.data == record.data:
                    return False
                raise TileIntegrityError(
                    f"signature {record.signature} re-uploaded with different bytes"
                )
            self._records[record.signature] = record
            self._refs.setdefault(record.signature, 0)
            return True

    def get(self, sig: str) -> TileRecord | None:
        with self._lock:
            return self._records.get(sig)

    def has_payload(self, sig: str) -> bool:
        with self._lock:
            return self._records.get(sig) is not None

    def payload_count(self, sigs) -> int:
        with self._lock:
            return sum(1 for s in sigs if self._records.get(s) is not None)


# --- recording persistence ---------------------------------------------------


def write_recording(
    directory: Path,
    meta: dict,
    updates: list[tuple[int, UpdateMessage]],  # (wall_ms, update)
    tiles: list[TileRecord],
    tokens_jsonl: str | None,
) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "tiles").mkdir(exist_ok=True)
    with (directory / "updates.jsonl").open("w", encoding="utf-8") as fh:
        for wall_ms, update in updates:
            fh.write(f"{wall_ms} ")
            fh.write(serialize_update(update).decode("utf-8"))
            fh.write("\n")
    for record in tiles:
        path = directory / "tiles" / f"{record.signature}{_EXT[record.codec]}"
        path.write_bytes(record.data)
    if tokens_jsonl is not None:
        (directory / "tokens.jsonl").write_text(tokens_jsonl, "utf-8")
    (directory / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True), "utf-8")


def read_updates_jsonl(path: Path) -> list[tuple[int, UpdateMessage]]:
    """Parse updates.jsonl lines of the form "<wall_ms> <update json>"."""
    out: list[tuple[int, UpdateMessage]] = []
    for line in path.read_text("utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        prefix, _, body = line.partition(" ")
        out.append((int(prefix), deserialize_update(body.encode("utf-8"))))
    return out


class RecordedSession:
    """An ended session: disk-backed after a flush, memory-backed otherwise."""

    def __init__(self, session_id: str, meta: dict, directory: Path | None = None,
                 updates: list[UpdateMessage] | None = None,
                 tiles: dict[str, TileRecord] | None = None):
        self.id = session_id
        self.meta = meta
        self._dir = directory
        self._updates = updates
        self._tiles = tiles or {}
        self._lock = threading.Lock()

    @classmethod
    def from_dir(cls, directory: Path) -> "RecordedSession":
        meta = json.loads((directory / "meta.json").read_text("utf-8"))
        return cls(session_id=meta["id"], meta=meta, directory=directory)

    def updates(self) -> list[UpdateMessage]:
        with self._lock:
            if self._updates is None:
                pairs = read_updates_jsonl(self._dir / "updates.jsonl")
                self._updates = [u for _, u in pairs]
            return self._updates

    def recording(self) -> SessionRecording:
        ups = self.updates()
        return SessionRecording(
            updates=[(u.timestamp_ms, u) for u in ups],
            duration_ms=self.meta.get("duration_ms", ups[-1].timestamp_ms if ups else 0),
        )

    def tile(self, sig: str) -> TileRecord | None:
        with self._lock:
            if sig in self._tiles:
                return self._tiles[sig]
        if self._dir is None:
            return None
        for ext, codec in _CODEC_BY_EXT.items():
            path = self._dir / "tiles" / f"{sig}{ext}"
            if path.exists():
                from PIL import Image
                import io

                data = path.read_bytes()
                with Image.open(io.BytesIO(data)) as img:
                    width, height = img.size
                record = TileRecord(signature=sig, width=width, height=height,
                                    codec=codec, data=data)
                with self._lock:
                    self._tiles[sig] = record
                return record
        return None

    def manifest(self) -> dict:
        return {
            "id": self.id,
            "status": "ended",
            "duration_ms": self.meta.get("duration_ms", 0),
            "updates": self.meta.get("updates", len(self.updates())),
            "tiles": self.meta.get("tiles", 0),
        }


def scan_recordings(storage_root: Path) -> dict[str, RecordedSession]:
    """Load every flushed session directory under the storage root."""
    sessions: dict[str, RecordedSession] = {}
    if not storage_root.is_dir():
        return sessions
    for child in sorted(storage_root.iterdir()):
        if child.is_dir() and (child / "meta.json").exists():
            rec = RecordedSession.from_dir(child)
            sessions[rec.id] = rec
    return sessions
