"""Shared fixtures and raster helpers."""

from __future__ import annotations

import numpy as np
import pytest

from tilecast.document import PageDocument, Raster
from tilecast.textindex import TextRun


def noise_raster(width: int, height: int, seed: int = 0) -> Raster:
    rng = np.random.default_rng(seed)
    data = rng.integers(0, 256, (height, width, 4), dtype=np.uint8)
    data[..., 3] = 255
    return Raster(width=width, height=height, data=data.tobytes())


def solid_raster(width: int, height: int, rgba=(30, 60, 200, 255)) -> Raster:
    return Raster(width=width, height=height, data=bytes(rgba) * (width * height))


def banded_raster(width: int, height: int, band: int = 64) -> Raster:
    """Horizontal color bands; compresses well and differs tile to tile."""
    img = np.zeros((height, width, 4), np.uint8)
    for i, y in enumerate(range(0, height, band)):
        img[y:y + band] = [(i * 37) % 256, (i * 91) % 256, (i * 53) % 256, 255]
    return Raster(width=width, height=height, data=img.tobytes())


def make_document(url: str = "https://example.test/page", width: int = 1024,
                  height: int = 2048, seed: int = 0,
                  runs: list[TextRun] | None = None) -> PageDocument:
    return PageDocument(url=url, raster=noise_raster(width, height, seed),
                        text_runs=runs or [])


@pytest.fixture(scope="session")
def benchmark_assets(tmp_path_factory):
    """seed-42 benchmark corpus, generated once per test session."""
    from tilecast.synth import generate_benchmark_assets

    out = tmp_path_factory.mktemp("bench-assets")
    docs_dir, script_path = generate_benchmark_assets(42, out)
    return docs_dir, script_path
