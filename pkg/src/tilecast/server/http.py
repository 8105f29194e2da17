"""HTTP front for the session hub.

Threaded stdlib server: one thread per request, so long-polls simply block
their handler thread on the session condition until ingest wakes them.

    POST /api/session                        -> {"id": ...}
    POST /api/session/{id}/update            -> {"missing": [sig...]}
    PUT  /api/session/{id}/tile/{sig}        -> 204
    GET  /api/session/{id}/tile/{sig}        -> image bytes (immutable)
    GET  /api/session/{id}/state?since&wait  -> update | 204 timeout | 410 ended
    POST /api/session/{id}/end               -> recording summary
    GET  /api/session/{id}/recording         -> recording manifest
    GET  /api/session/{id}/recording/state?at -> update | 204 not ready
    POST /api/session/{id}/text              -> {"indexed": n}
    GET  /api/search?q=WORDS&limit=N         -> {"hits": [...]}
    GET  /viewer/...                         -> static viewer bundle (optional)
"""

from __future__ import annotations

import gzip
import json
import io
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from PIL import Image

from ..errors import (
    SequenceError,
    ServerFullError,
    SessionEndedError,
    SessionUnknownError,
    TileIntegrityError,
    TilecastError,
    WireParseError,
    WireValidationError,
)
from ..protocol import TileRecord, deserialize_update, serialize_update
from ..textindex import TextRun
from .config import ServerConfig
from .hub import SessionHub

log = logging.getLogger("tilecast.server.http")

_SID = r"(?P<sid>[a-z0-9]{8})"
_SIG = r"(?P<sig>[0-9a-f]{32})"

_ROUTES = [
    ("POST", re.compile(r"^/api/session$"), "create_session"),
    ("POST", re.compile(rf"^/api/session/{_SID}/update$"), "post_update"),
    ("PUT", re.compile(rf"^/api/session/{_SID}/tile/{_SIG}$"), "put_tile"),
    ("GET", re.compile(rf"^/api/session/{_SID}/tile/{_SIG}$"), "get_tile"),
    ("GET", re.compile(rf"^/api/session/{_SID}/state$"), "get_state"),
    ("POST", re.compile(rf"^/api/session/{_SID}/end$"), "end_session"),
    ("GET", re.compile(rf"^/api/session/{_SID}/recording$"), "get_recording"),
    ("GET", re.compile(rf"^/api/session/{_SID}/recording/state$"), "recording_state"),
    ("POST", re.compile(rf"^/api/session/{_SID}/text$"), "post_text"),
    ("GET", re.compile(r"^/api/search$"), "search"),
]

_MIME = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "tilecast-relay"

    @property
    def hub(self) -> SessionHub:
        return self.server.hub  # type: ignore[attr-defined]

    @property
    def viewer_dir(self) -> Path | None:
        return self.server.viewer_dir  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    # --- plumbing -----------------------------------------------------------

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        data = self.rfile.read(length) if length else b""
        self._wire_len = len(data)  # on-the-wire size, before transfer decoding
        if self.headers.get("Content-Encoding", "").lower() == "gzip":
            try:
                data = gzip.decompress(data)
            except OSError as exc:
                raise WireParseError(f"bad gzip body: {exc}") from exc
        return data

    def _send(self, code: int, payload: bytes = b"", content_type: str = "application/json",
              extra: dict | None = None) -> None:
        self.send_response(code)
        if code != 204:
            self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        for key, value in (extra or {}).items():
            self.send_header(key, value)
        self.end_headers()
        if payload:
            self.wfile.write(payload)

    def _send_json(self, code: int, obj: dict) -> None:
        self._send(code, json.dumps(obj, separators=(",", ":")).encode("utf-8"))

    def _dispatch(self, method: str) -> None:
        split = urlsplit(self.path)
        query = {k: v[-1] for k, v in parse_qs(split.query).items()}
        if method == "GET" and (split.path == "/" or split.path.startswith("/viewer")):
            self._serve_viewer(split.path)
            return
        for verb, pattern, name in _ROUTES:
            if verb != method:
                continue
            match = pattern.match(split.path)
            if match:
                try:
                    getattr(self, f"_h_{name}")(query, **match.groupdict())
                except TilecastError as exc:
                    self._send_error(exc)
                except (BrokenPipeError, ConnectionResetError):
                    raise
                except Exception:  # pragma: no cover - defensive
                    log.exception("unhandled error on %s %s", method, self.path)
                    self._send_json(500, {"error": "internal"})
                return
        self._send_json(404, {"error": "no such route"})

    def _send_error(self, exc: TilecastError) -> None:
        if isinstance(exc, SessionUnknownError):
            self._send_json(404, {"error": str(exc)})
        elif isinstance(exc, SequenceError):
            self._send_json(409, {"error": str(exc), "expected": exc.expected, "got": exc.got})
        elif isinstance(exc, (TileIntegrityError, SessionEndedError)):
            code = 410 if isinstance(exc, SessionEndedError) and self.command == "GET" else 409
            self._send_json(code, {"error": str(exc)})
        elif isinstance(exc, ServerFullError):
            self._send_json(503, {"error": str(exc)})
        elif isinstance(exc, (WireParseError, WireValidationError)):
            code = 400 if isinstance(exc, WireParseError) else 422
            self._send_json(code, {"error": str(exc)})
        else:
            self._send_json(400, {"error": str(exc)})

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    # --- handlers -------------------------------------------------------------

    def _h_create_session(self, query):
        self._body()
        self._send_json(200, {"id": self.hub.create_session()})

    def _h_post_update(self, query, sid):
        body = self._body()
        update = deserialize_update(body)
        missing = self.hub.ingest_update(sid, update, wire_bytes=self._wire_len)
        self._send_json(200, {"missing": missing})

    def _h_put_tile(self, query, sid, sig):
        body = self._body()
        declared = (self.headers.get("Content-Type") or "").lower()
        codec = "jpeg" if "jpeg" in declared or "jpg" in declared else "png"
        try:
            with Image.open(io.BytesIO(body)) as img:
                width, height = img.size
                actual = (img.format or "").lower()
        except Exception as exc:
            raise WireParseError(f"tile payload is not a decodable image: {exc}") from exc
        if actual not in ("png", "jpeg"):
            raise WireValidationError(f"unsupported tile codec {actual!r}")
        if (actual == "jpeg") != (codec == "jpeg"):
            raise WireValidationError(
                f"declared codec {codec} but payload is {actual}"
            )
        record = TileRecord(signature=sig, width=width, height=height, codec=codec, data=body)
        self.hub.put_tile(sid, record, wire_bytes=self._wire_len)
        self._send(204)

    def _h_get_tile(self, query, sid, sig):
        record = self.hub.get_tile(sid, sig)
        content_type = "image/png" if record.codec == "png" else "image/jpeg"
        self._send(200, record.data, content_type, extra={
            "ETag": f'"{record.signature}"',
            "Cache-Control": "public, max-age=31536000, immutable",
        })

    def _h_get_state(self, query, sid):
        since = int(query.get("since", 0))
        wait_ms = int(query.get("wait", 0))
        update = self.hub.get_state(sid, since, wait_ms)
        if update is None:
            self._send(204)
        else:
            self._send(200, serialize_update(update))

    def _h_end_session(self, query, sid):
        self._body()
        self._send_json(200, self.hub.end_session(sid))

    def _h_get_recording(self, query, sid):
        self._send_json(200, self.hub.recording_manifest(sid))

    def _h_recording_state(self, query, sid):
        at_ms = int(query.get("at", 0))
        update = self.hub.recording_state(sid, at_ms)
        if update is None:
            self._send(204)
        else:
            self._send(200, serialize_update(update))

    def _h_post_text(self, query, sid):
        body = self._body()
        try:
            obj = json.loads(body.decode("utf-8"))
            seq = int(obj["seq"])
            runs = [
                TextRun(text=r["text"], x=int(r["x"]), y=int(r["y"]),
                        w=int(r["w"]), h=int(r["h"]), url=r.get("url", ""), seq=seq)
                for r in obj["runs"]
            ]
        except (ValueError, KeyError, TypeError) as exc:
            raise WireValidationError(f"bad text payload: {exc}") from exc
        count = self.hub.index_text(sid, seq, runs, wire_bytes=self._wire_len)
        self._send_json(200, {"indexed": count})

    def _h_search(self, query):
        q = query.get("q", "")
        limit = int(query.get("limit", 50))
        hits = self.hub.search(q, limit)
        self._send_json(200, {"hits": [h.to_json() for h in hits]})

    # --- static viewer ---------------------------------------------------------

    def _serve_viewer(self, path: str) -> None:
        if self.viewer_dir is None:
            self._send_json(404, {"error": "no viewer bundle configured"})
            return
        rel = path.removeprefix("/viewer").lstrip("/") or "index.html"
        target = (self.viewer_dir / rel).resolve()
        root = self.viewer_dir.resolve()
        if not target.is_relative_to(root) or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        data = target.read_bytes()
        mime = _MIME.get(target.suffix, "application/octet-stream")
        self._send(200, data, mime)


class RelayServer:
    """Embeddable relay: wraps a hub in a threaded HTTP server."""

    def __init__(self, config: ServerConfig | None = None, hub: SessionHub | None = None):
        self.config = config or ServerConfig()
        self.hub = hub or SessionHub(
            storage_root=self.config.storage_root,
            max_sessions=self.config.max_sessions,
            long_poll_cap_ms=self.config.long_poll_cap_ms,
            verify_signatures=self.config.verify_signatures,
        )
        self._httpd = ThreadingHTTPServer((self.config.host, self.config.port), _Handler)
        self._httpd.daemon_threads = True
        self._httpd.hub = self.hub  # type: ignore[attr-defined]
        self._httpd.viewer_dir = (  # type: ignore[attr-defined]
            Path(self.config.viewer_dir) if self.config.viewer_dir else None
        )
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def url(self) -> str:
        host = self.config.host or "127.0.0.1"
        return f"http://{host}:{self.port}"

    def start(self) -> "RelayServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        log.info("relay listening on %s", self.url)
        return self

    def serve_forever(self) -> None:
        log.info("relay listening on %s", self.url)
        self._httpd.serve_forever()

    def stop(self) -> None:
        self.hub.close()
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "RelayServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
