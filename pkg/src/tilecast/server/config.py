"""Relay configuration: JSON file, overridden by TILECAST_* environment vars."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path


@dataclass
class ServerConfig:
    listen: str = "127.0.0.1:8787"
    storage_root: str | None = "./tilecast-data"
    max_sessions: int = 64
    long_poll_cap_ms: int = 30000
    viewer_dir: str | None = None
    verify_signatures: bool = False

    @property
    def host(self) -> str:
        host, _, _ = self.listen.rpartition(":")
        return host or "127.0.0.1"

    @property
    def port(self) -> int:
        _, _, port = self.listen.rpartition(":")
        return int(port)

    @classmethod
    def load(cls, path: Path | str | None = None, env: dict | None = None) -> "ServerConfig":
        """File values first, then environment overrides."""
        env = os.environ if env is None else env
        values: dict = {}
        if path is not None:
            raw = json.loads(Path(path).read_text("utf-8"))
            if not isinstance(raw, dict):
                raise ValueError(f"config {path} must be a JSON object")
            unknown = set(raw) - set(cls.__dataclass_fields__)
            if unknown:
                raise ValueError(f"config {path}: unknown keys {sorted(unknown)}")
            values.update(raw)
        if "TILECAST_LISTEN" in env:
            values["listen"] = env["TILECAST_LISTEN"]
        if "TILECAST_STORAGE_ROOT" in env:
            values["storage_root"] = env["TILECAST_STORAGE_ROOT"] or None
        if "TILECAST_MAX_SESSIONS" in env:
            values["max_sessions"] = int(env["TILECAST_MAX_SESSIONS"])
        if "TILECAST_LONG_POLL_CAP_MS" in env:
            values["long_poll_cap_ms"] = int(env["TILECAST_LONG_POLL_CAP_MS"])
        if "TILECAST_VIEWER_DIR" in env:
            values["viewer_dir"] = env["TILECAST_VIEWER_DIR"] or None
        if "TILECAST_VERIFY_SIGNATURES" in env:
            values["verify_signatures"] = env["TILECAST_VERIFY_SIGNATURES"].lower() in ("1", "true", "yes")
        return cls(**values)
