"""Pure-Python pixel kernels: the fallback when the native extension is absent.

Same contract as tilecast._kernels. Rasters are raw RGBA bytes, row-major,
4 bytes per pixel. The signature prefix per tile is
url || 0x00 || "col,row" || 0x00 (must stay in sync with the native kernel
and with protocol.tile_signature).
"""

from __future__ import annotations

import hashlib

BACKEND = "python"


def md5_hex(data: bytes) -> str:
    return hashlib.md5(data).hexdigest()


def grid_signatures(url: bytes, data, width: int, height: int) -> list[str]:
    """Signatures for every grid tile of a full-page raster, row-major."""
    if width < 1 or height < 1:
        raise ValueError(f"raster must be positive-sized, got {width}x{height}")
    if len(data) != 4 * width * height:
        raise ValueError(f"raster length {len(data)} != 4*{width}*{height}")
    mv = memoryview(data)
    stride = 4 * width
    cols = -(-width // 256)
    rows = -(-height // 256)
    out: list[str] = []
    for r in range(rows):
        y0 = r * 256
        th = min(256, height - y0)
        for c in range(cols):
            x0 = c * 256
            tw = min(256, width - x0)
            h = hashlib.md5(url)
            h.update(b"\x00%d,%d\x00" % (c, r))
            row_bytes = 4 * tw
            off = y0 * stride + 4 * x0
            for _ in range(th):
                h.update(mv[off:off + row_bytes])
                off += stride
            out.append(h.hexdigest())
    return out


def crop_rgba(data, width: int, height: int, x: int, y: int, w: int, h: int) -> bytes:
    """Copy a sub-rectangle out of a raster."""
    if w < 1 or h < 1:
        raise ValueError(f"crop must be positive-sized, got {w}x{h}")
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(f"crop {w}x{h}@({x},{y}) outside {width}x{height}")
    if len(data) != 4 * width * height:
        raise ValueError(f"raster length {len(data)} != 4*{width}*{height}")
    mv = memoryview(data)
    stride = 4 * width
    row_bytes = 4 * w
    off = y * stride + 4 * x
    parts = []
    for _ in range(h):
        parts.append(mv[off:off + row_bytes])
        off += stride
    return b"".join(parts)


def paste_rgba(data, width: int, height: int, patch, pw: int, ph: int, x: int, y: int) -> bytes:
    """New raster with patch composited at (x, y); zero-area patch is identity."""
    if len(data) != 4 * width * height:
        raise ValueError(f"raster length {len(data)} != 4*{width}*{height}")
    if pw == 0 or ph == 0:
        return bytes(data)
    if pw < 0 or ph < 0:
        raise ValueError(f"patch must be non-negative-sized, got {pw}x{ph}")
    if x < 0 or y < 0 or x + pw > width or y + ph > height:
        raise ValueError(f"patch {pw}x{ph}@({x},{y}) outside {width}x{height}")
    if len(patch) != 4 * pw * ph:
        raise ValueError(f"patch length {len(patch)} != 4*{pw}*{ph}")
    out = bytearray(data)
    pmv = memoryview(patch)
    stride = 4 * width
    prow = 4 * pw
    off = y * stride + 4 * x
    for j in range(ph):
        out[off:off + prow] = pmv[j * prow:(j + 1) * prow]
        off += stride
    return bytes(out)
