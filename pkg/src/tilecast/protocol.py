"""Tile geometry, content signatures, image codecs, and the update wire format.

Everything here is a pure function over value types; publisher, relay, and
harness all share this module. The page is cut into a document-anchored grid
of 256x256 tiles (edge tiles cropped, never padded), each identified by an
MD5 over url + grid position + raw RGBA pixels, so identical content at the
same position of the same page hashes identically no matter which codec later
compresses it.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

from PIL import Image

from .errors import GeometryError, PixelBufferError, WireParseError, WireValidationError

TILE_SIZE = 256

_HEX32 = frozenset("0123456789abcdef")


def is_signature(value: object) -> bool:
    """True if value is a 32-char lowercase hex tile signature."""
    return isinstance(value, str) and len(value) == 32 and set(value) <= _HEX32


class CursorShape(str, Enum):
    DEFAULT = "default"
    POINTER = "pointer"
    TEXT = "text"
    WAIT = "wait"
    MOVE = "move"
    CROSSHAIR = "crosshair"

    @classmethod
    def coerce(cls, value: object) -> "CursorShape":
        """Map unknown inputs to DEFAULT instead of failing."""
        try:
            return cls(value)
        except ValueError:
            return cls.DEFAULT


@dataclass(frozen=True)
class TilePos:
    """Grid position, (0,0) = top-left tile of the page document."""

    col: int
    row: int

    def __post_init__(self):
        if self.col < 0 or self.row < 0:
            raise GeometryError(f"negative tile position {self.col},{self.row}")


@dataclass(frozen=True)
class TileRect:
    """A grid tile's pixel rectangle in document coordinates."""

    pos: TilePos
    x: int
    y: int
    width: int
    height: int


@dataclass(frozen=True)
class CursorState:
    x: int = 0
    y: int = 0
    shape: CursorShape = CursorShape.DEFAULT


@dataclass(frozen=True)
class ViewportState:
    viewport_width: int
    viewport_height: int
    scroll_x: int
    scroll_y: int
    scrollable_width: int
    scrollable_height: int

    def __post_init__(self):
        if self.scrollable_width < 1 or self.scrollable_height < 1:
            raise GeometryError("scrollable area must be at least 1x1")
        if self.viewport_width < 1 or self.viewport_height < 1:
            raise GeometryError("viewport must be at least 1x1")
        max_x = max(0, self.scrollable_width - self.viewport_width)
        max_y = max(0, self.scrollable_height - self.viewport_height)
        if not (0 <= self.scroll_x <= max_x) or not (0 <= self.scroll_y <= max_y):
            raise GeometryError(
                f"scroll ({self.scroll_x},{self.scroll_y}) outside [0,{max_x}]x[0,{max_y}]"
            )


@dataclass
class UpdateMessage:
    """One capture tick: full tile map plus cursor/scroll metadata.

    Sent every tick even when no tile changed; new_tiles lists the signatures
    whose payloads travel alongside this message.
    """

    seq: int
    timestamp_ms: int
    url: str
    viewport: ViewportState
    cursor: CursorState
    tile_map: dict[TilePos, str]
    new_tiles: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.seq < 1:
            raise WireValidationError(f"seq must be >= 1, got {self.seq}")
        if self.timestamp_ms < 0:
            raise WireValidationError("timestamp_ms must be >= 0")
        expected = {
            r.pos for r in compute_tile_grid(
                self.viewport.scrollable_width, self.viewport.scrollable_height
            )
        }
        got = set(self.tile_map)
        if got != expected:
            missing = expected - got
            extra = got - expected
            raise WireValidationError(
                f"tile_map does not cover the grid exactly "
                f"({len(missing)} missing, {len(extra)} extra)"
            )
        for sig in self.tile_map.values():
            if not is_signature(sig):
                raise WireValidationError(f"bad signature {sig!r}")
        map_sigs = set(self.tile_map.values())
        for sig in self.new_tiles:
            if sig not in map_sigs:
                raise WireValidationError(f"new_tiles signature {sig} not in tile_map")


@dataclass(frozen=True)
class TileRecord:
    """Content-addressed compressed tile image."""

    signature: str
    width: int
    height: int
    codec: str  # "png" | "jpeg"
    data: bytes


@dataclass(frozen=True)
class CodecPolicy:
    """Tile compression policy: lossless png, lossy jpeg, or smaller-of-both."""

    kind: str = "png"  # "png" | "jpeg" | "auto"
    jpeg_quality: int = 75

    def __post_init__(self):
        if self.kind not in ("png", "jpeg", "auto"):
            raise ValueError(f"unknown codec policy {self.kind!r}")
        if not 1 <= self.jpeg_quality <= 100:
            raise ValueError("jpeg quality must be in 1..100")

    @classmethod
    def parse(cls, text: str) -> "CodecPolicy":
        """Parse CLI spellings: png | jpeg:<q> | auto."""
        if text == "png":
            return cls("png")
        if text == "auto":
            return cls("auto")
        if text.startswith("jpeg"):
            _, _, q = text.partition(":")
            return cls("jpeg", int(q) if q else 75)
        raise ValueError(f"unknown codec {text!r}")


PNG = CodecPolicy("png")


def grid_dims(scrollable_width: int, scrollable_height: int) -> tuple[int, int]:
    """(cols, rows) of the tile grid covering a scrollable area."""
    if scrollable_width < 1 or scrollable_height < 1:
        raise GeometryError(
            f"scrollable area must be positive, got {scrollable_width}x{scrollable_height}"
        )
    return math.ceil(scrollable_width / TILE_SIZE), math.ceil(scrollable_height / TILE_SIZE)


def tile_rect(scrollable_width: int, scrollable_height: int, pos: TilePos) -> TileRect:
    """Rect of one grid position; edge tiles are cropped to the page bounds."""
    cols, rows = grid_dims(scrollable_width, scrollable_height)
    if pos.col >= cols or pos.row >= rows:
        raise GeometryError(f"position {pos} outside {cols}x{rows} grid")
    x = pos.col * TILE_SIZE
    y = pos.row * TILE_SIZE
    return TileRect(
        pos=pos,
        x=x,
        y=y,
        width=min(TILE_SIZE, scrollable_width - x),
        height=min(TILE_SIZE, scrollable_height - y),
    )


def compute_tile_grid(scrollable_width: int, scrollable_height: int) -> list[TileRect]:
    """All tile rects in row-major order; their union tiles the page exactly."""
    cols, rows = grid_dims(scrollable_width, scrollable_height)
    return [
        tile_rect(scrollable_width, scrollable_height, TilePos(c, r))
        for r in range(rows)
        for c in range(cols)
    ]


def tiles_intersecting_viewport(viewport: ViewportState) -> list[TilePos]:
    """Grid positions whose rect intersects the visible region, row-major."""
    cols, rows = grid_dims(viewport.scrollable_width, viewport.scrollable_height)
    x0 = viewport.scroll_x
    y0 = viewport.scroll_y
    x1 = min(x0 + viewport.viewport_width, viewport.scrollable_width)
    y1 = min(y0 + viewport.viewport_height, viewport.scrollable_height)
    if x1 <= x0 or y1 <= y0:
        return []
    c0 = x0 // TILE_SIZE
    c1 = min((x1 - 1) // TILE_SIZE, cols - 1)
    r0 = y0 // TILE_SIZE
    r1 = min((y1 - 1) // TILE_SIZE, rows - 1)
    return [TilePos(c, r) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]


def signature_prefix(url: str, pos: TilePos) -> bytes:
    """Hash input prefix: url and "col,row" with NUL separators.

    The separators keep (url="a", col=12) and (url="a1", col=2) distinct.
    """
    return url.encode("utf-8") + b"\x00" + f"{pos.col},{pos.row}".encode("ascii") + b"\x00"


def tile_signature(
    url: str,
    pos: TilePos,
    pixels: bytes,
    width: int | None = None,
    height: int | None = None,
) -> str:
    """MD5 over url + tile position + raw RGBA pixels, as 32 lowercase hex chars.

    Hashing raw pixels (not compressed bytes) keeps tile identity independent
    of the codec. Pass width/height to enforce the exact buffer length.
    """
    if width is not None and height is not None:
        if len(pixels) != 4 * width * height:
            raise PixelBufferError(
                f"expected {4 * width * height} bytes for {width}x{height}, got {len(pixels)}"
            )
    elif len(pixels) == 0 or len(pixels) % 4 != 0:
        raise PixelBufferError(f"RGBA buffer length {len(pixels)} is not a positive multiple of 4")
    digest = hashlib.md5(signature_prefix(url, pos))
    digest.update(pixels)
    return digest.hexdigest()


def encode_tile(
    pixels: bytes,
    width: int,
    height: int,
    policy: CodecPolicy = PNG,
    *,
    url: str,
    pos: TilePos,
) -> TileRecord:
    """Compress one tile; the record's signature hashes the input pixels."""
    if width < 1 or height < 1:
        raise GeometryError(f"cannot encode {width}x{height} tile")
    if len(pixels) != 4 * width * height:
        raise PixelBufferError(
            f"expected {4 * width * height} bytes for {width}x{height}, got {len(pixels)}"
        )
    sig = tile_signature(url, pos, pixels, width, height)
    image = Image.frombytes("RGBA", (width, height), pixels)
    png_bytes = jpeg_bytes = None
    if policy.kind in ("png", "auto"):
        buf = io.BytesIO()
        image.save(buf, "PNG", optimize=True)
        png_bytes = buf.getvalue()
    if policy.kind in ("jpeg", "auto"):
        buf = io.BytesIO()
        image.convert("RGB").save(buf, "JPEG", quality=policy.jpeg_quality)
        jpeg_bytes = buf.getvalue()
    if policy.kind == "png" or (policy.kind == "auto" and len(png_bytes) <= len(jpeg_bytes)):
        codec, data = "png", png_bytes
    else:
        codec, data = "jpeg", jpeg_bytes
    return TileRecord(signature=sig, width=width, height=height, codec=codec, data=data)


def decode_tile(record: TileRecord) -> bytes:
    """Decompress a record back to raw RGBA; validates the pixel count."""
    image = Image.open(io.BytesIO(record.data)).convert("RGBA")
    if image.size != (record.width, record.height):
        raise PixelBufferError(
            f"decoded {image.size[0]}x{image.size[1]}, record declares "
            f"{record.width}x{record.height}"
        )
    return image.tobytes()


# --- wire format -----------------------------------------------------------
#
# {"seq":int,"ts_ms":int,"url":str,"vw":int,"vh":int,"sx":int,"sy":int,
#  "sw":int,"sh":int,"cx":int,"cy":int,"cshape":str,
#  "tiles":[{"c":int,"r":int,"sig":hex32}],"new":[hex32]}
#
# Unknown fields are ignored on read. Tile payloads travel separately as
# standard PNG/JFIF byte streams.


def serialize_update(update: UpdateMessage) -> bytes:
    """Encode to the compact JSON wire form (deterministic field/tile order)."""
    update.validate()
    v = update.viewport
    body = {
        "seq": update.seq,
        "ts_ms": update.timestamp_ms,
        "url": update.url,
        "vw": v.viewport_width,
        "vh": v.viewport_height,
        "sx": v.scroll_x,
        "sy": v.scroll_y,
        "sw": v.scrollable_width,
        "sh": v.scrollable_height,
        "cx": update.cursor.x,
        "cy": update.cursor.y,
        "cshape": update.cursor.shape.value,
        "tiles": [
            {"c": pos.col, "r": pos.row, "sig": update.tile_map[pos]}
            for pos in sorted(update.tile_map, key=lambda p: (p.row, p.col))
        ],
        "new": list(update.new_tiles),
    }
    return json.dumps(body, separators=(",", ":")).encode("utf-8")


def _require(obj: dict, key: str, kind: type):
    if key not in obj:
        raise WireValidationError(f"missing field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise WireValidationError(f"field {key!r} must be {kind.__name__}")
    return value


def deserialize_update(data: bytes) -> UpdateMessage:
    """Parse and validate a wire message; round trip of serialize_update."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise WireParseError("invalid UTF-8", exc.start) from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WireParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(obj, dict):
        raise WireValidationError("update message must be a JSON object")
    try:
        viewport = ViewportState(
            viewport_width=_require(obj, "vw", int),
            viewport_height=_require(obj, "vh", int),
            scroll_x=_require(obj, "sx", int),
            scroll_y=_require(obj, "sy", int),
            scrollable_width=_require(obj, "sw", int),
            scrollable_height=_require(obj, "sh", int),
        )
    except GeometryError as exc:
        raise WireValidationError(str(exc)) from exc
    cursor = CursorState(
        x=_require(obj, "cx", int),
        y=_require(obj, "cy", int),
        shape=CursorShape.coerce(obj.get("cshape")),
    )
    tile_map: dict[TilePos, str] = {}
    tiles = _require(obj, "tiles", list)
    for entry in tiles:
        if not isinstance(entry, dict):
            raise WireValidationError("tile entries must be objects")
        try:
            pos = TilePos(_require(entry, "c", int), _require(entry, "r", int))
        except GeometryError as exc:
            raise WireValidationError(str(exc)) from exc
        if pos in tile_map:
            raise WireValidationError(f"duplicate tile entry at {pos.col},{pos.row}")
        tile_map[pos] = _require(entry, "sig", str)
    new = _require(obj, "new", list)
    for sig in new:
        if not isinstance(sig, str):
            raise WireValidationError("new entries must be signature strings")
    update = UpdateMessage(
        seq=_require(obj, "seq", int),
        timestamp_ms=_require(obj, "ts_ms", int),
        url=_require(obj, "url", str),
        viewport=viewport,
        cursor=cursor,
        tile_map=tile_map,
        new_tiles=list(new),
    )
    update.validate()
    return update
