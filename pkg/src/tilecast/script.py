"""Timed session scripts: the deterministic stand-in for live user input.

A script is JSON lines, one event per line:

    {"t_ms":0,"ev":"navigate","doc":"page-0"}
    {"t_ms":2000,"ev":"scroll","x":0,"y":512}
    {"t_ms":2500,"ev":"cursor","x":300,"y":640,"shape":"pointer"}
    {"t_ms":4000,"ev":"mutate","x":96,"y":800,"patch":"patch-0.png"}
    {"t_ms":150000,"ev":"end"}

Times are non-decreasing, the first event is navigate at t=0, the last is
end. Mutate patch paths resolve relative to the documents directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import json

from .document import PageDocument, Raster
from .errors import ScriptError
from .protocol import CursorShape


@dataclass(frozen=True)
class NavigateEvent:
    t_ms: int
    doc_id: str


@dataclass(frozen=True)
class ScrollEvent:
    t_ms: int
    x: int
    y: int


@dataclass(frozen=True)
class CursorEvent:
    t_ms: int
    x: int
    y: int
    shape: CursorShape = CursorShape.DEFAULT


@dataclass(frozen=True)
class MutateEvent:
    t_ms: int
    x: int
    y: int
    patch: Raster


@dataclass(frozen=True)
class EndEvent:
    t_ms: int


ScriptEvent = NavigateEvent | ScrollEvent | CursorEvent | MutateEvent | EndEvent


@dataclass(frozen=True)
class SessionScript:
    events: list[NavigateEvent | ScrollEvent | CursorEvent | MutateEvent | EndEvent]

    @property
    def duration_ms(self) -> int:
        return self.events[-1].t_ms

    def cursor_keyframes(self) -> list[CursorEvent]:
        return [e for e in self.events if isinstance(e, CursorEvent)]

    def navigate_count(self) -> int:
        return sum(1 for e in self.events if isinstance(e, NavigateEvent))


def _event_from_json(obj: dict, lineno: int, patch_dir: Path | None) -> ScriptEvent:
    try:
        t_ms = int(obj["t_ms"])
        kind = obj["ev"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"line {lineno}: missing or invalid t_ms/ev: {exc}") from exc
    if t_ms < 0:
        raise ScriptError(f"line {lineno}: negative t_ms")
    try:
        if kind == "navigate":
            return NavigateEvent(t_ms, str(obj["doc"]))
        if kind == "scroll":
            return ScrollEvent(t_ms, int(obj["x"]), int(obj["y"]))
        if kind == "cursor":
            return CursorEvent(t_ms, int(obj["x"]), int(obj["y"]),
                               CursorShape.coerce(obj.get("shape")))
        if kind == "mutate":
            if patch_dir is None:
                raise ScriptError(f"line {lineno}: mutate event needs a documents directory")
            patch_path = patch_dir / str(obj["patch"])
            try:
                patch = Raster.load_png(patch_path)
            except FileNotFoundError as exc:
                raise ScriptError(f"line {lineno}: patch not found: {patch_path}") from exc
            return MutateEvent(t_ms, int(obj["x"]), int(obj["y"]), patch)
        if kind == "end":
            return EndEvent(t_ms)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"line {lineno}: invalid {kind} event: {exc}") from exc
    raise ScriptError(f"line {lineno}: unknown event kind {kind!r}")


def parse_script(text: str, patch_dir: Path | str | None = None) -> SessionScript:
    """Parse JSON-lines script text and check event ordering invariants."""
    patch_dir = Path(patch_dir) if patch_dir is not None else None
    events: list[ScriptEvent] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"line {lineno}: invalid JSON: {exc}") from exc
        events.append(_event_from_json(obj, lineno, patch_dir))
    if not events:
        raise ScriptError("script has no events")
    if not isinstance(events[0], NavigateEvent) or events[0].t_ms != 0:
        raise ScriptError("first event must be navigate at t_ms=0")
    if not isinstance(events[-1], EndEvent):
        raise ScriptError("last event must be end")
    for a, b in zip(events, events[1:]):
        if b.t_ms < a.t_ms:
            raise ScriptError(f"event times must be non-decreasing ({a.t_ms} -> {b.t_ms})")
    for e in events[:-1]:
        if isinstance(e, EndEvent):
            raise ScriptError("end event must be last")
    return SessionScript(events=events)


def load_script(path: Path | str, patch_dir: Path | str | None = None) -> SessionScript:
    path = Path(path)
    if patch_dir is None:
        patch_dir = path.parent
    return parse_script(path.read_text("utf-8"), patch_dir)


def validate_script(
    script: SessionScript,
    documents: dict[str, PageDocument],
    viewport_width: int,
    viewport_height: int,
) -> None:
    """Check document references, scroll bounds, and mutation bounds."""
    doc: PageDocument | None = None
    for e in script.events:
        if isinstance(e, NavigateEvent):
            if e.doc_id not in documents:
                raise ScriptError(f"navigate at t={e.t_ms}: unknown document {e.doc_id!r}")
            doc = documents[e.doc_id]
        elif isinstance(e, ScrollEvent):
            assert doc is not None  # first event is navigate
            max_x = max(0, doc.width - viewport_width)
            max_y = max(0, doc.height - viewport_height)
            if not (0 <= e.x <= max_x and 0 <= e.y <= max_y):
                raise ScriptError(
                    f"scroll at t={e.t_ms}: ({e.x},{e.y}) outside [0,{max_x}]x[0,{max_y}]"
                )
        elif isinstance(e, MutateEvent):
            assert doc is not None
            if e.x < 0 or e.y < 0 or e.x + e.patch.width > doc.width or e.y + e.patch.height > doc.height:
                raise ScriptError(
                    f"mutate at t={e.t_ms}: patch outside {doc.width}x{doc.height} raster"
                )


def event_to_json(event: ScriptEvent, patch_name: str | None = None) -> str:
    """Serialize one event to its JSON-lines form (for script generators)."""
    if isinstance(event, NavigateEvent):
        obj = {"t_ms": event.t_ms, "ev": "navigate", "doc": event.doc_id}
    elif isinstance(event, ScrollEvent):
        obj = {"t_ms": event.t_ms, "ev": "scroll", "x": event.x, "y": event.y}
    elif isinstance(event, CursorEvent):
        obj = {"t_ms": event.t_ms, "ev": "cursor", "x": event.x, "y": event.y,
               "shape": event.shape.value}
    elif isinstance(event, MutateEvent):
        obj = {"t_ms": event.t_ms, "ev": "mutate", "x": event.x, "y": event.y,
               "patch": patch_name}
    elif isinstance(event, EndEvent):
        obj = {"t_ms": event.t_ms, "ev": "end"}
    else:
        raise TypeError(f"unknown event {event!r}")
    return json.dumps(obj, separators=(",", ":"))
