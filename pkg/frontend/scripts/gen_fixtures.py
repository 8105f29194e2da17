#!/usr/bin/env python3
"""Produce wire-format fixtures for the viewer tests.

Runs one publisher capture over a seeded synthetic page and writes exactly
what would cross the wire: the update JSON at a scrolled position, the PNG
tile payloads it references, plus the expected visible-region crop as a PNG.
Regenerate with: python scripts/gen_fixtures.py (from frontend/).
"""

import io
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from tilecast.document import PageDocument, Raster
from tilecast.protocol import (
    CursorShape,
    CursorState,
    PNG,
    ViewportState,
    serialize_update,
)
from tilecast.publisher import SentSet, capture_tick

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def main():
    rng = np.random.default_rng(2718)
    width, height = 700, 1200
    img = np.empty((height, width, 4), np.uint8)
    img[:] = (235, 238, 242, 255)
    img[0:80] = (40, 90, 180, 255)
    for y in range(120, height - 60, 48):
        band = rng.integers(30, 70, 3)
        img[y:y + 10, 40:width - 40 - int(rng.integers(0, 200))] = (*band, 255)
    ramp = np.linspace(0, 255, 300).astype(np.uint8)
    img[400:700, 100:400, 0] = ramp[:, None]
    img[400:700, 100:400, 1] = 90
    img[400:700, 100:400, 2] = ramp[::-1][:, None]

    doc = PageDocument(
        url="https://fixtures.test/page",
        raster=Raster(width=width, height=height, data=img.tobytes()),
    )
    viewport = ViewportState(
        viewport_width=512, viewport_height=400,
        scroll_x=60, scroll_y=350,
        scrollable_width=width, scrollable_height=height,
    )
    cursor = CursorState(x=300, y=500, shape=CursorShape.POINTER)
    update, records = capture_tick(doc, viewport, cursor, SentSet(), seq=7, ts_ms=1500)

    tiles_dir = OUT / "tiles"
    tiles_dir.mkdir(parents=True, exist_ok=True)
    (OUT / "update.json").write_bytes(serialize_update(update))
    for record in records:
        (tiles_dir / f"{record.signature}.png").write_bytes(record.data)

    crop = doc.raster.crop(viewport.scroll_x, viewport.scroll_y, 512, 400)
    Image.frombytes("RGBA", (512, 400), crop).save(OUT / "expected_visible.png")
    meta = {
        "tile_count": len(records),
        "visible": {"x": viewport.scroll_x, "y": viewport.scroll_y, "w": 512, "h": 400},
    }
    (OUT / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    print(f"wrote {len(records)} tiles + update + expected crop to {OUT}")


if __name__ == "__main__":
    sys.exit(main())
