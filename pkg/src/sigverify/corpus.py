"""Corpus loading: directory trees, manifests, image decoding.

Two layouts are accepted: an explicit JSON manifest, or a convention tree

    root/<writer_id>/genuine/*.png|pgm|tif|tiff
    root/<writer_id>/forgery/*.png|pgm|tif|tiff

Images are decoded to 8-bit grayscale; color inputs are collapsed with the
usual 0.299 / 0.587 / 0.114 luminance weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .imaging import GrayImage

IMAGE_EXTENSIONS = (".png", ".pgm", ".tif", ".tiff")
LUMINANCE_WEIGHTS = np.array([0.299, 0.587, 0.114])


class CorpusError(ValueError):
    """Corpus layout or decoding problem; the message names the path."""


@dataclass
class WriterSamples:
    writer_id: str
    genuine: list
    forgery: list = field(default_factory=list)


@dataclass
class Corpus:
    corpus_id: str
    writers: list
    dpi: int | None = None
    notes: str = ""

    def writer_ids(self) -> list[str]:
        return [w.writer_id for w in self.writers]

    def get(self, writer_id: str) -> WriterSamples:
        for w in self.writers:
            if w.writer_id == writer_id:
                return w
        raise KeyError(f"unknown writer: {writer_id}")


def load_image(path) -> GrayImage:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"missing image file: {path}")
    try:
        with Image.open(path) as im:
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                arr = np.rint(rgb @ LUMINANCE_WEIGHTS)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise CorpusError(f"cannot decode image: {path} ({exc})") from exc
    return GrayImage(np.clip(arr, 0.0, 255.0))


def save_image(img: GrayImage, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.rint(img.pixels).clip(0, 255).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path)


def _image_files(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    )


def load_corpus_tree(root) -> Corpus:
    """Load the convention directory layout; writers sorted by id."""
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"missing corpus directory: {root}")
    writers = []
    for writer_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        genuine_dir = writer_dir / "genuine"
        if not genuine_dir.is_dir():
            raise CorpusError(f"missing genuine directory: {genuine_dir}")
        genuine_paths = _image_files(genuine_dir)
        if not genuine_paths:
            raise CorpusError(f"writer with zero genuine images: {writer_dir}")
        forgery_dir = writer_dir / "forgery"
        forgery_paths = _image_files(forgery_dir) if forgery_dir.is_dir() else []
        writers.append(
            WriterSamples(
                writer_id=writer_dir.name,
                genuine=[load_image(p) for p in genuine_paths],
                forgery=[load_image(p) for p in forgery_paths],
            )
        )
    if not writers:
        raise CorpusError(f"no writer directories under: {root}")
    return Corpus(corpus_id=root.name, writers=writers)


def build_manifest(root) -> dict:
    """Scan the convention tree and describe it with relative paths."""
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"missing corpus directory: {root}")
    writers = []
    for writer_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        genuine_dir = writer_dir / "genuine"
        if not genuine_dir.is_dir():
            raise CorpusError(f"missing genuine directory: {genuine_dir}")
        genuine = _image_files(genuine_dir)
        if not genuine:
            raise CorpusError(f"writer with zero genuine images: {writer_dir}")
        forgery_dir = writer_dir / "forgery"
        forgery = _image_files(forgery_dir) if forgery_dir.is_dir() else []
        writers.append(
            {
                "writer_id": writer_dir.name,
                "genuine": [str(p.relative_to(root)) for p in genuine],
                "forgery": [str(p.relative_to(root)) for p in forgery],
            }
        )
    return {"corpus_id": root.name, "dpi": None, "notes": "", "writers": writers}


def save_manifest(manifest: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def load_corpus_manifest(manifest_path) -> Corpus:
    """Load a manifest file; image paths are relative to its directory."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise CorpusError(f"missing manifest file: {manifest_path}")
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"invalid manifest {manifest_path}: {exc}") from exc
    base = manifest_path.parent
    writers = []
    seen = set()
    for rec in doc.get("writers", []):
        wid = rec["writer_id"]
        if wid in seen:
            raise CorpusError(f"duplicate writer_id in manifest: {wid}")
        seen.add(wid)
        genuine_paths = [base / p for p in rec.get("genuine", [])]
        forgery_paths = [base / p for p in rec.get("forgery", [])]
        for p in genuine_paths + forgery_paths:
            if not p.is_file():
                raise CorpusError(f"manifest references missing file: {p}")
        if not genuine_paths:
            raise CorpusError(f"writer with zero genuine images: {wid}")
        writers.append(
            WriterSamples(
                writer_id=wid,
                genuine=[load_image(p) for p in genuine_paths],
                forgery=[load_image(p) for p in forgery_paths],
            )
        )
    if not writers:
        raise CorpusError(f"manifest lists no writers: {manifest_path}")
    return Corpus(
        corpus_id=doc.get("corpus_id", manifest_path.stem),
        writers=writers,
        dpi=doc.get("dpi"),
        notes=doc.get("notes", ""),
    )


def load_corpus(path) -> Corpus:
    """Dispatch on path type: file means manifest, directory means tree."""
    path = Path(path)
    if path.is_file():
        return load_corpus_manifest(path)
    return load_corpus_tree(path)


def save_corpus_tree(corpus: Corpus, root) -> None:
    """Write a corpus out as the convention directory layout (PNG files)."""
    root = Path(root)
    for w in corpus.writers:
        for idx, img in enumerate(w.genuine):
            save_image(img, root / w.writer_id / "genuine" / f"g{idx:03d}.png")
        for idx, img in enumerate(w.forgery):
            save_image(img, root / w.writer_id / "forgery" / f"f{idx:03d}.png")
