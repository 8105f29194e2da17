"""Reconstruct the visible region of an update from its tiles.

The inverse of capture: place each viewport-intersecting tile at
(col*256, row*256) on the document surface, then crop the scroll window.
With PNG tiles the result is byte-identical to the publisher's raster crop.
"""

from __future__ import annotations

from . import kernels
from .document import Raster
from .errors import CaptureError
from .protocol import (
    TileRecord,
    UpdateMessage,
    decode_tile,
    tile_rect,
    tiles_intersecting_viewport,
)


def compose_visible(update: UpdateMessage, tiles: dict[str, TileRecord],
                    background: tuple[int, int, int, int] = (0, 0, 0, 0)) -> Raster:
    """Composite the update's visible region from decoded tiles.

    `tiles` maps signature -> TileRecord; missing tiles are left as the
    background color (the placeholder the viewer would show).
    """
    v = update.viewport
    width = min(v.viewport_width, v.scrollable_width - v.scroll_x)
    height = min(v.viewport_height, v.scrollable_height - v.scroll_y)
    if width < 1 or height < 1:
        raise CaptureError("viewport has no visible intersection with the document")
    data = bytes(background) * (width * height)
    for pos in tiles_intersecting_viewport(v):
        sig = update.tile_map[pos]
        record = tiles.get(sig)
        if record is None:
            continue
        rect = tile_rect(v.scrollable_width, v.scrollable_height, pos)
        pixels = decode_tile(record)
        # overlap of the tile rect with the visible window, in document coords
        x0 = max(rect.x, v.scroll_x)
        y0 = max(rect.y, v.scroll_y)
        x1 = min(rect.x + rect.width, v.scroll_x + width)
        y1 = min(rect.y + rect.height, v.scroll_y + height)
        part = kernels.crop_rgba(
            pixels, rect.width, rect.height,
            x0 - rect.x, y0 - rect.y, x1 - x0, y1 - y0,
        )
        data = kernels.paste_rgba(
            data, width, height, part, x1 - x0, y1 - y0,
            x0 - v.scroll_x, y0 - v.scroll_y,
        )
    return Raster(width=width, height=height, data=data)
