"""Page documents: the raster stand-in for a rendered page, plus mutations.

A PageDocument is immutable; apply_mutation returns a new document so the
full-grid tile signatures can be cached per instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from . import kernels
from .errors import LoadError, MutationError
from .protocol import TilePos, grid_dims
from .textindex import TextRun


@dataclass(frozen=True)
class Raster:
    """Raw RGBA image, row-major, 4 bytes per pixel."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"raster must be positive-sized, got {self.width}x{self.height}")
        if len(self.data) != 4 * self.width * self.height:
            raise ValueError(
                f"raster data length {len(self.data)} != 4*{self.width}*{self.height}"
            )

    @classmethod
    def from_image(cls, image: Image.Image) -> "Raster":
        rgba = image.convert("RGBA")
        return cls(width=rgba.width, height=rgba.height, data=rgba.tobytes())

    @classmethod
    def load_png(cls, path: Path | str) -> "Raster":
        with Image.open(path) as img:
            return cls.from_image(img)

    def to_image(self) -> Image.Image:
        return Image.frombytes("RGBA", (self.width, self.height), self.data)

    def crop(self, x: int, y: int, w: int, h: int) -> bytes:
        return kernels.crop_rgba(self.data, self.width, self.height, x, y, w, h)


@dataclass
class PageDocument:
    """Synthetic stand-in for a rendered page: full-page raster plus text runs."""

    url: str
    raster: Raster
    text_runs: list[TextRun] = field(default_factory=list)
    _tile_sigs: dict[TilePos, str] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    @property
    def width(self) -> int:
        return self.raster.width

    @property
    def height(self) -> int:
        return self.raster.height

    def tile_signatures(self) -> dict[TilePos, str]:
        """Full document grid tile_map; computed once per (immutable) document."""
        if self._tile_sigs is None:
            cols, _rows = grid_dims(self.width, self.height)
            sigs = kernels.grid_signatures(
                self.url.encode("utf-8"), self.raster.data, self.width, self.height
            )
            self._tile_sigs = {
                TilePos(i % cols, i // cols): sig for i, sig in enumerate(sigs)
            }
        return self._tile_sigs


def load_page_document(manifest_path: Path | str) -> PageDocument:
    """Load a page from its JSON manifest.

    Manifest: {"url": str, "raster": "page.png", "text_runs": "runs.json"?,
    "width"?: int, "height"?: int}. Paths are relative to the manifest file.
    Optional width/height must match the raster.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text("utf-8"))
    except FileNotFoundError as exc:
        raise LoadError(f"manifest not found: {manifest_path}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict) or not isinstance(manifest.get("url"), str):
        raise LoadError(f"manifest {manifest_path}: missing or invalid 'url'")
    if not isinstance(manifest.get("raster"), str):
        raise LoadError(f"manifest {manifest_path}: missing or invalid 'raster'")

    raster_path = manifest_path.parent / manifest["raster"]
    try:
        raster = Raster.load_png(raster_path)
    except FileNotFoundError as exc:
        raise LoadError(f"raster not found: {raster_path}") from exc
    except Exception as exc:
        raise LoadError(f"raster {raster_path} failed to decode: {exc}") from exc

    for dim in ("width", "height"):
        if dim in manifest and manifest[dim] != getattr(raster, dim):
            raise LoadError(
                f"manifest {dim} {manifest[dim]} != raster {dim} {getattr(raster, dim)}"
            )

    runs: list[TextRun] = []
    if manifest.get("text_runs") is not None:
        runs_path = manifest_path.parent / manifest["text_runs"]
        try:
            raw_runs = json.loads(runs_path.read_text("utf-8"))
        except FileNotFoundError as exc:
            raise LoadError(f"text_runs file not found: {runs_path}") from exc
        except json.JSONDecodeError as exc:
            raise LoadError(f"text_runs {runs_path} is not valid JSON: {exc}") from exc
        if not isinstance(raw_runs, list):
            raise LoadError(f"text_runs {runs_path}: expected a JSON list")
        for i, entry in enumerate(raw_runs):
            try:
                run = TextRun(
                    text=entry["text"],
                    x=int(entry["x"]),
                    y=int(entry["y"]),
                    w=int(entry["w"]),
                    h=int(entry["h"]),
                    url=manifest["url"],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise LoadError(f"text_runs {runs_path}[{i}]: {exc}") from exc
            if run.x < 0 or run.y < 0 or run.x + run.w > raster.width or run.y + run.h > raster.height:
                raise LoadError(
                    f"text_runs {runs_path}[{i}]: bbox "
                    f"({run.x},{run.y},{run.w},{run.h}) outside "
                    f"{raster.width}x{raster.height} raster"
                )
            runs.append(run)

    return PageDocument(url=manifest["url"], raster=raster, text_runs=runs)


def load_documents(docs_dir: Path | str) -> dict[str, PageDocument]:
    """Load every page manifest in a directory, keyed by filename stem.

    A *.json file is treated as a manifest when it holds an object with
    "url" and "raster" keys; anything else (e.g. *.runs.json) is skipped.
    """
    docs_dir = Path(docs_dir)
    if not docs_dir.is_dir():
        raise LoadError(f"documents directory not found: {docs_dir}")
    documents: dict[str, PageDocument] = {}
    for path in sorted(docs_dir.glob("*.json")):
        try:
            raw = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError:
            continue
        if isinstance(raw, dict) and "url" in raw and "raster" in raw:
            documents[path.stem] = load_page_document(path)
    if not documents:
        raise LoadError(f"no page manifests found in {docs_dir}")
    return documents


def apply_mutation(doc: PageDocument, dest_x: int, dest_y: int, patch: Raster | None) -> PageDocument:
    """Composite a patch onto the document raster; returns a new document.

    Only tiles overlapping the patch change signatures. A None or zero-area
    patch returns a document with identical content.
    """
    if patch is None:
        return PageDocument(url=doc.url, raster=doc.raster, text_runs=doc.text_runs)
    if dest_x < 0 or dest_y < 0 or dest_x + patch.width > doc.width or dest_y + patch.height > doc.height:
        raise MutationError(
            f"patch {patch.width}x{patch.height}@({dest_x},{dest_y}) "
            f"outside {doc.width}x{doc.height} raster"
        )
    data = kernels.paste_rgba(
        doc.raster.data, doc.width, doc.height,
        patch.data, patch.width, patch.height, dest_x, dest_y,
    )
    raster = Raster(width=doc.width, height=doc.height, data=data)
    return PageDocument(url=doc.url, raster=raster, text_runs=doc.text_runs)
