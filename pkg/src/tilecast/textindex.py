"""Keyword index over captured text runs.

Exact-token inverted index: runs are tokenized on whitespace/punctuation
boundaries and lowercased. Multi-word queries AND at the sequence-number
level, so "fuji homepage" matches only capture ticks where both tokens were
on screen. No stemming, no ranking.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased tokens split on whitespace and punctuation (incl. underscore)."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TextRun:
    """A captured string with its on-page bounding box."""

    text: str
    x: int
    y: int
    w: int
    h: int
    url: str = ""
    seq: int = 0

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"text run bbox must be positive-sized, got {self.w}x{self.h}")
        if not self.text:
            raise ValueError("text run must not be empty")

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class SearchHit:
    session: str
    seq: int
    timestamp_ms: int
    url: str
    bbox: tuple[int, int, int, int]
    snippet: str

    def to_json(self) -> dict:
        return {
            "session": self.session,
            "seq": self.seq,
            "ts_ms": self.timestamp_ms,
            "url": self.url,
            "bbox": list(self.bbox),
            "snippet": self.snippet,
        }


@dataclass
class _IndexedRun:
    text: str
    bbox: tuple[int, int, int, int]
    url: str
    seq: int
    ts_ms: int
    tokens: frozenset[str]


@dataclass
class _SessionEntries:
    runs_by_seq: dict[int, list[_IndexedRun]] = field(default_factory=dict)
    token_seqs: dict[str, set[int]] = field(default_factory=dict)


class TextIndex:
    """Per-session inverted index; safe for concurrent reads and writes."""

    def __init__(self):
        self._lock = threading.RLock()
        self._sessions: dict[str, _SessionEntries] = {}

    def index_runs(self, session: str, seq: int, ts_ms: int, runs: list[TextRun]) -> int:
        """Index runs captured at one sequence number; returns runs indexed."""
        if not runs:
            return 0
        with self._lock:
            entries = self._sessions.setdefault(session, _SessionEntries())
            bucket = entries.runs_by_seq.setdefault(seq, [])
            for run in runs:
                tokens = frozenset(tokenize(run.text))
                bucket.append(
                    _IndexedRun(
                        text=run.text, bbox=run.bbox, url=run.url,
                        seq=seq, ts_ms=ts_ms, tokens=tokens,
                    )
                )
                for token in tokens:
                    entries.token_seqs.setdefault(token, set()).add(seq)
            return len(runs)

    def search(self, query: str, limit: int = 50) -> list[SearchHit]:
        """Case-insensitive exact-token match, ordered by (session, seq)."""
        tokens = tokenize(query)
        if not tokens or limit <= 0:
            return []
        wanted = set(tokens)
        hits: list[SearchHit] = []
        with self._lock:
            for session in sorted(self._sessions):
                entries = self._sessions[session]
                seq_sets = [entries.token_seqs.get(t) for t in tokens]
                if any(s is None for s in seq_sets):
                    continue
                qualified = set.intersection(*seq_sets)
                for seq in sorted(qualified):
                    for run in entries.runs_by_seq[seq]:
                        if run.tokens & wanted:
                            hits.append(
                                SearchHit(
                                    session=session, seq=seq, timestamp_ms=run.ts_ms,
                                    url=run.url, bbox=run.bbox, snippet=run.text,
                                )
                            )
                            if len(hits) >= limit:
                                return hits
        return hits

    # --- persistence: one tokens.jsonl per session --------------------------

    def dump_session(self, session: str, path: Path | str) -> None:
        """Write the session's indexed runs, one JSON object per line."""
        with self._lock:
            entries = self._sessions.get(session)
            lines = []
            if entries is not None:
                for seq in sorted(entries.runs_by_seq):
                    for run in entries.runs_by_seq[seq]:
                        lines.append(json.dumps({
                            "seq": run.seq,
                            "ts_ms": run.ts_ms,
                            "url": run.url,
                            "bbox": list(run.bbox),
                            "text": run.text,
                        }, separators=(",", ":")))
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")

    def load_session(self, session: str, path: Path | str) -> int:
        """Rebuild a session's index from its tokens.jsonl; returns runs loaded."""
        count = 0
        with self._lock:
            for line in Path(path).read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                obj = json.loads(line)
                x, y, w, h = obj["bbox"]
                run = TextRun(text=obj["text"], x=x, y=y, w=w, h=h,
                              url=obj["url"], seq=obj["seq"])
                self.index_runs(session, obj["seq"], obj["ts_ms"], [run])
                count += 1
        return count

    def sessions(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)
