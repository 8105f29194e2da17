"""Synthetic benchmark assets: seeded page rasters, text runs, and a script.

Pages mix text-like line bands with image-like blocks (solid fills and
gradients) so tiles compress realistically, and the script navigates across
every page with scrolling and cursor motion — a desk-scale stand-in for a
recorded multi-page browsing session.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .document import PageDocument, Raster
from .script import (
    CursorEvent,
    EndEvent,
    NavigateEvent,
    ScrollEvent,
    SessionScript,
    event_to_json,
)

PAGE_WIDTH = 1024
PAGE_HEIGHT = 3000
PAGE_COUNT = 9
SCRIPT_MS = 150_000
VIEW_W, VIEW_H = 1024, 768

_CONSONANTS = "bcdfglmnprstvz"
_VOWELS = "aeiou"


def _word(rng: np.random.Generator) -> str:
    n = int(rng.integers(2, 5))
    return "".join(
        _CONSONANTS[int(rng.integers(len(_CONSONANTS)))] + _VOWELS[int(rng.integers(len(_VOWELS)))]
        for _ in range(n)
    )


def _sentence(rng: np.random.Generator, lo: int = 3, hi: int = 8) -> str:
    return " ".join(_word(rng) for _ in range(int(rng.integers(lo, hi + 1))))


def _pastel(rng: np.random.Generator) -> np.ndarray:
    return np.array([int(rng.integers(200, 246)) for _ in range(3)] + [255], np.uint8)


def _accent(rng: np.random.Generator) -> np.ndarray:
    return np.array([int(rng.integers(40, 200)) for _ in range(3)] + [255], np.uint8)


def _draw_text_band(img: np.ndarray, rng: np.random.Generator, y: int, height: int) -> None:
    """Rows of dark word-length strips with gaps, like rendered body text."""
    ink = np.array([50, 52, 58, 255], np.uint8)
    line = y
    while line + 12 < y + height:
        x = 48
        right = PAGE_WIDTH - 48 - int(rng.integers(0, 200))
        while x < right:
            w = int(rng.integers(24, 90))
            w = min(w, right - x)
            if w > 6:
                img[line:line + 9, x:x + w] = ink
            x += w + int(rng.integers(6, 16))
        line += 24


def _draw_image_block(img: np.ndarray, rng: np.random.Generator, y: int, height: int) -> None:
    x0 = 48 + int(rng.integers(0, 160))
    x1 = PAGE_WIDTH - 48 - int(rng.integers(0, 160))
    c0 = _accent(rng).astype(np.float64)
    c1 = _accent(rng).astype(np.float64)
    kind = int(rng.integers(3))
    block = img[y:y + height, x0:x1]
    if kind == 0:  # solid with border
        block[:] = c0.astype(np.uint8)
        border = c1.astype(np.uint8)
        block[:4, :] = border
        block[-4:, :] = border
        block[:, :4] = border
        block[:, -4:] = border
    elif kind == 1:  # vertical gradient
        ramp = np.linspace(0, 1, block.shape[0])[:, None, None]
        block[:] = (c0 * (1 - ramp) + c1 * ramp).astype(np.uint8)
    else:  # horizontal gradient
        ramp = np.linspace(0, 1, block.shape[1])[None, :, None]
        block[:] = (c0 * (1 - ramp) + c1 * ramp).astype(np.uint8)


def generate_page(rng: np.random.Generator, index: int) -> tuple[PageDocument, list[dict]]:
    """One synthetic page plus its text-run JSON entries."""
    from .textindex import TextRun

    img = np.empty((PAGE_HEIGHT, PAGE_WIDTH, 4), np.uint8)
    img[:] = _pastel(rng)
    img[0:96] = _accent(rng)

    runs: list[dict] = []
    title = _sentence(rng, 2, 4)
    runs.append({"text": title, "x": 48, "y": 28, "w": 40 + 14 * len(title), "h": 40})

    y = 140
    while y < PAGE_HEIGHT - 320:
        height = int(rng.integers(140, 320))
        height = min(height, PAGE_HEIGHT - 64 - y)
        if int(rng.integers(10)) < 6:
            _draw_text_band(img, rng, y, height)
            sentence = _sentence(rng)
            runs.append({
                "text": sentence,
                "x": 48, "y": y,
                "w": min(PAGE_WIDTH - 96, 24 + 11 * len(sentence)),
                "h": 20,
            })
        else:
            _draw_image_block(img, rng, y, height)
        y += height + int(rng.integers(24, 72))

    url = f"https://pages.example.test/article-{index:02d}"
    text_runs = [
        TextRun(text=r["text"], x=r["x"], y=r["y"], w=r["w"], h=r["h"], url=url)
        for r in runs
    ]
    doc = PageDocument(
        url=url,
        raster=Raster(width=PAGE_WIDTH, height=PAGE_HEIGHT, data=img.tobytes()),
        text_runs=text_runs,
    )
    return doc, runs


def generate_script(rng: np.random.Generator, page_ids: list[str]) -> SessionScript:
    """Navigate across all pages with scrolling and interpolated cursor motion."""
    events = []
    dwell = SCRIPT_MS // len(page_ids)
    max_scroll = PAGE_HEIGHT - VIEW_H
    for i, page_id in enumerate(page_ids):
        t0 = i * dwell
        events.append(NavigateEvent(t_ms=t0, doc_id=page_id))
        # progressive scroll down the page, occasionally jumping back up
        fractions = [0.22, 0.45, 0.68, 1.0]
        for k, frac in enumerate(fractions):
            jitter = int(rng.integers(-40, 41))
            y = max(0, min(max_scroll, int(frac * max_scroll) + jitter))
            events.append(ScrollEvent(t_ms=t0 + 2600 + k * 3000, x=0, y=y))
        if int(rng.integers(3)) == 0:
            events.append(ScrollEvent(t_ms=t0 + dwell - 1500, x=0,
                                      y=int(rng.integers(0, max_scroll // 2))))
        scroll_at = [0] + [max(0, min(max_scroll, int(f * max_scroll))) for f in fractions]
        for k in range(6):
            tc = t0 + 400 + k * (dwell // 6)
            sy = scroll_at[min(k, len(scroll_at) - 1)]
            events.append(CursorEvent(
                t_ms=tc,
                x=int(rng.integers(60, PAGE_WIDTH - 60)),
                y=sy + int(rng.integers(60, VIEW_H - 60)),
            ))
    events.append(EndEvent(t_ms=SCRIPT_MS))
    events.sort(key=lambda e: e.t_ms)
    return SessionScript(events=events)


def generate_benchmark_assets(seed: int, out_dir: Path | str) -> tuple[Path, Path]:
    """Write docs/ and script.jsonl under out_dir; returns (docs_dir, script_path).

    Byte-identical output for the same seed.
    """
    out_dir = Path(out_dir)
    docs_dir = out_dir / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    page_ids = []
    for i in range(PAGE_COUNT):
        doc, run_entries = generate_page(rng, i)
        page_id = f"page-{i:02d}"
        page_ids.append(page_id)
        doc.raster.to_image().save(docs_dir / f"{page_id}.png", "PNG", optimize=True)
        (docs_dir / f"{page_id}.runs.json").write_text(
            json.dumps(run_entries, indent=1, sort_keys=True), "utf-8"
        )
        manifest = {
            "url": doc.url,
            "raster": f"{page_id}.png",
            "text_runs": f"{page_id}.runs.json",
            "width": PAGE_WIDTH,
            "height": PAGE_HEIGHT,
        }
        (docs_dir / f"{page_id}.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True), "utf-8"
        )

    script = generate_script(rng, page_ids)
    script_path = out_dir / "script.jsonl"
    script_path.write_text(
        "\n".join(event_to_json(e) for e in script.events) + "\n", "utf-8"
    )
    return docs_dir, script_path
