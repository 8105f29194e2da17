"""Exception hierarchy shared across the publisher, relay, and harness."""

from __future__ import annotations


class TilecastError(Exception):
    """Base class for all tilecast errors."""


class GeometryError(TilecastError):
    """Invalid tile/viewport geometry (non-positive dimension, bad bounds)."""


class PixelBufferError(TilecastError):
    """Pixel buffer length does not match the declared dimensions."""


class WireParseError(TilecastError):
    """Byte stream is not parseable as a wire message."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class WireValidationError(TilecastError):
    """Message parsed but violates a protocol invariant."""


class LoadError(TilecastError):
    """Page manifest or referenced asset failed to load."""


class ScriptError(TilecastError):
    """Session script is malformed or violates event ordering/bounds."""


class MutationError(TilecastError):
    """Mutation patch falls outside the document raster."""


class CaptureError(TilecastError):
    """Capture geometry inconsistent with the current document."""


class TransportError(TilecastError):
    """Relay unreachable or HTTP exchange failed."""


class SessionUnknownError(TilecastError):
    """No live or recorded session with this id."""


class SessionEndedError(TilecastError):
    """Operation requires a live session but the session has ended."""


class SequenceError(TilecastError):
    """Update arrived out of order."""

    def __init__(self, expected: int, got: int):
        super().__init__(f"expected seq {expected}, got {got}")
        self.expected = expected
        self.got = got


class TileIntegrityError(TilecastError):
    """A signature was re-uploaded with different payload bytes."""


class ServerFullError(TilecastError):
    """Live session limit reached."""
