"""tilecast: tile-based web session sharing.

A scriptable publisher cuts page rasters into content-addressed 256x256
tiles and streams them to an HTTP relay; viewers poll the relay live or
replay recordings; captured text is redacted, indexed, and keyword
searchable; a bench harness measures bytes on the wire against a naive
full-frame baseline.
"""

__version__ = "0.1.0"

from .document import PageDocument, Raster, apply_mutation, load_documents, load_page_document
from .privacy import PrivacyPolicy, apply_privacy_filter
from .protocol import (
    PNG,
    CodecPolicy,
    CursorShape,
    CursorState,
    TilePos,
    TileRecord,
    TileRect,
    UpdateMessage,
    ViewportState,
    compute_tile_grid,
    decode_tile,
    deserialize_update,
    encode_tile,
    serialize_update,
    tile_signature,
    tiles_intersecting_viewport,
)
from .publisher import (
    DirectRelay,
    HttpRelay,
    PublisherConfig,
    SentSet,
    SessionStats,
    capture_tick,
    reference_capture,
    run_session,
)
from .script import SessionScript, load_script, parse_script
from .textindex import SearchHit, TextIndex, TextRun

__all__ = [
    "PNG",
    "CodecPolicy",
    "CursorShape",
    "CursorState",
    "DirectRelay",
    "HttpRelay",
    "PageDocument",
    "PrivacyPolicy",
    "PublisherConfig",
    "Raster",
    "SearchHit",
    "SentSet",
    "SessionScript",
    "SessionStats",
    "TextIndex",
    "TextRun",
    "TilePos",
    "TileRecord",
    "TileRect",
    "UpdateMessage",
    "ViewportState",
    "apply_mutation",
    "apply_privacy_filter",
    "capture_tick",
    "compute_tile_grid",
    "decode_tile",
    "deserialize_update",
    "encode_tile",
    "load_documents",
    "load_page_document",
    "load_script",
    "parse_script",
    "reference_capture",
    "run_session",
    "serialize_update",
    "tile_signature",
    "tiles_intersecting_viewport",
]

